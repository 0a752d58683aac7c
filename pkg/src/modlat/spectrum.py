"""Prime ideals and finitely generated subsets of the spectrum.

Two backends are supported: the integers (primes are the zero ideal and the
ideals generated by a prime number) and a polynomial ring over a field where
only monomial primes, i.e. primes generated by a subset of the variables, are
represented.  A SpecSubset is a finite list of primes together with a flag
saying whether it denotes exactly those primes or their specialization
closure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import singledispatch
from itertools import combinations

Z_BACKEND = ("z",)

DEFAULT_MAX_VARS = 8


def monomial_backend(context) -> tuple:
    return ("monomial", tuple(context))


def is_prime_number(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond desk scale."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeId:
    """A representable prime ideal of one of the two backends."""

    kind: str  # "z_generic" | "z_maximal" | "monomial"
    p: int | None = None
    vars: frozenset | None = None
    context: tuple | None = None

    def __post_init__(self):
        if self.kind == "z_generic":
            if self.p is not None or self.vars is not None:
                raise ValueError("generic prime takes no data")
        elif self.kind == "z_maximal":
            if self.p is None or not is_prime_number(self.p):
                raise ValueError(f"{self.p!r} is not a prime number")
        elif self.kind == "monomial":
            if self.context is None or self.vars is None:
                raise ValueError("monomial prime needs a context and a variable set")
            if not self.vars <= set(self.context):
                raise ValueError("variables outside the ring context")
        else:
            raise ValueError(f"unknown prime kind {self.kind!r}")

    @classmethod
    def z_generic(cls) -> "PrimeId":
        return cls("z_generic")

    @classmethod
    def z_maximal(cls, p: int) -> "PrimeId":
        return cls("z_maximal", p=p)

    @classmethod
    def monomial(cls, context, variables) -> "PrimeId":
        return cls("monomial", vars=frozenset(variables), context=tuple(context))

    @property
    def backend(self) -> tuple:
        if self.kind == "monomial":
            return monomial_backend(self.context)
        return Z_BACKEND

    def is_maximal(self) -> bool:
        if self.kind == "z_maximal":
            return True
        if self.kind == "monomial":
            return self.vars == set(self.context)
        return False

    def height(self) -> int:
        if self.kind == "z_generic":
            return 0
        if self.kind == "z_maximal":
            return 1
        return len(self.vars)

    def contained_in(self, other: "PrimeId") -> bool:
        """Ideal containment self <= other (specialization order)."""
        if self.backend != other.backend:
            raise ValueError("primes from different backends")
        if self.kind == "z_generic":
            return True
        if self.kind == "z_maximal":
            return other.kind == "z_maximal" and self.p == other.p
        return self.vars <= other.vars

    def sort_key(self):
        if self.kind == "z_generic":
            return (0, 0, ())
        if self.kind == "z_maximal":
            return (1, self.p, ())
        return (2, len(self.vars), tuple(sorted(self.vars)))

    def __str__(self) -> str:
        if self.kind == "z_generic":
            return "(0)"
        if self.kind == "z_maximal":
            return f"({self.p})"
        if not self.vars:
            return "(0)"
        return "(" + ",".join(sorted(self.vars)) + ")"


def all_monomial_primes(context, max_vars: int = DEFAULT_MAX_VARS) -> tuple:
    context = tuple(context)
    if len(context) > max_vars:
        raise ValueError(f"context has {len(context)} variables, cap is {max_vars}")
    primes = []
    for size in range(len(context) + 1):
        for combo in combinations(context, size):
            primes.append(PrimeId.monomial(context, combo))
    return tuple(primes)


def _common_backend(primes, backend=None) -> tuple:
    backends = {p.backend for p in primes}
    if backend is not None:
        backends.add(tuple(backend))
    if not backends:
        raise ValueError("cannot infer a backend from an empty prime set")
    if len(backends) > 1:
        raise ValueError(f"mixed backends: {sorted(backends)}")
    return backends.pop()


@dataclass(frozen=True, eq=False)
class SpecSubset:
    """Finitely generated subset of Spec, optionally specialization-closed.

    With closed=True the subset denotes the union of V(p) over the listed
    generators; with closed=False it denotes exactly the listed primes.
    Equality and ordering compare denoted sets, not presentations.
    """

    backend: tuple
    generators: frozenset
    closed: bool

    def __post_init__(self):
        for p in self.generators:
            if p.backend != self.backend:
                raise ValueError("generator backend mismatch")

    @classmethod
    def empty(cls, backend) -> "SpecSubset":
        return cls(tuple(backend), frozenset(), True)

    @classmethod
    def closure(cls, primes, backend=None) -> "SpecSubset":
        primes = frozenset(primes)
        return cls(_common_backend(primes, backend), primes, True)

    @classmethod
    def explicit(cls, primes, backend=None) -> "SpecSubset":
        primes = frozenset(primes)
        return cls(_common_backend(primes, backend), primes, False)

    @classmethod
    def whole_spec(cls, backend) -> "SpecSubset":
        backend = tuple(backend)
        if backend == Z_BACKEND:
            return cls.closure([PrimeId.z_generic()])
        return cls.closure([PrimeId.monomial(backend[1], [])])

    # -- denotation -----------------------------------------------------

    def _denotation(self):
        """("all",) for the whole spectrum of Z, else the frozen member set."""
        if self.backend == Z_BACKEND:
            if self.closed and any(p.kind == "z_generic" for p in self.generators):
                return ("all",)
            return self.generators
        if not self.closed:
            return self.generators
        context = self.backend[1]
        members = set()
        for gen in self.generators:
            rest = [v for v in context if v not in gen.vars]
            for size in range(len(rest) + 1):
                for extra in combinations(rest, size):
                    members.add(PrimeId.monomial(context, gen.vars | set(extra)))
        return frozenset(members)

    def is_whole(self) -> bool:
        den = self._denotation()
        if den == ("all",):
            return True
        if self.backend == Z_BACKEND:
            return False
        return len(den) == 2 ** len(self.backend[1])

    def is_finite(self) -> bool:
        return self._denotation() != ("all",)

    def members(self) -> frozenset:
        den = self._denotation()
        if den == ("all",):
            raise ValueError("subset denotes the whole (infinite) spectrum")
        return den

    def contains(self, prime: PrimeId) -> bool:
        if prime.backend != self.backend:
            raise ValueError("backend mismatch")
        if self.closed:
            return any(g.contained_in(prime) for g in self.generators)
        return prime in self.generators

    def leq(self, other: "SpecSubset") -> bool:
        if self.backend != other.backend:
            raise ValueError("backend mismatch")
        da, db = self._denotation(), other._denotation()
        if db == ("all",):
            return True
        if da == ("all",):
            return False
        return da <= db

    def join(self, other: "SpecSubset") -> "SpecSubset":
        if self.backend != other.backend:
            raise ValueError("backend mismatch")
        if self.closed and other.closed:
            return SpecSubset(self.backend, self.generators | other.generators, True)
        da, db = self._denotation(), other._denotation()
        if da == ("all",) or db == ("all",):
            return SpecSubset.whole_spec(self.backend)
        return SpecSubset(self.backend, da | db, False)

    def meet(self, other: "SpecSubset") -> "SpecSubset":
        if self.backend != other.backend:
            raise ValueError("backend mismatch")
        da, db = self._denotation(), other._denotation()
        if da == ("all",):
            return other
        if db == ("all",):
            return self
        common = da & db
        if self.closed and other.closed:
            minimal = frozenset(
                p for p in common
                if not any(q is not p and q.contained_in(p) and q != p for q in common)
            )
            return SpecSubset(self.backend, minimal, True)
        return SpecSubset(self.backend, common, False)

    def is_specialization_closed(self) -> bool:
        den = self._denotation()
        if den == ("all",):
            return True
        if self.backend == Z_BACKEND:
            # A finite set of primes of Z is closed exactly when it avoids
            # the generic point (whose closure is everything).
            return all(p.kind != "z_generic" for p in den)
        universe = all_monomial_primes(self.backend[1])
        return all(
            q in den
            for p in den
            for q in universe
            if p.contained_in(q)
        )

    def sorted_members(self) -> list:
        return sorted(self.members(), key=PrimeId.sort_key)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SpecSubset)
            and self.backend == other.backend
            and self._denotation() == other._denotation()
        )

    def __hash__(self) -> int:
        return hash((self.backend, self._denotation()))

    def __str__(self) -> str:
        tag = "closure" if self.closed else "set"
        inner = ",".join(str(p) for p in sorted(self.generators, key=PrimeId.sort_key))
        return f"{tag}{{{inner}}}"


def specialization_closure(primes, backend=None) -> SpecSubset:
    """Smallest specialization-closed subset containing the given primes."""
    return SpecSubset.closure(primes, backend)


def contains(subset: SpecSubset, prime: PrimeId) -> bool:
    return subset.contains(prime)


def lattice_join(a: SpecSubset, b: SpecSubset) -> SpecSubset:
    return a.join(b)


def lattice_meet(a: SpecSubset, b: SpecSubset) -> SpecSubset:
    return a.meet(b)


def leq(a: SpecSubset, b: SpecSubset) -> bool:
    return a.leq(b)


@singledispatch
def v_of_ideal(ideal) -> SpecSubset:
    """Closed subset V(I): the primes containing the ideal."""
    raise TypeError(f"no vanishing-locus rule for {type(ideal).__name__}")


def minimal_variable_covers(supports, context) -> tuple:
    """Inclusion-minimal variable sets meeting every support in `supports`.

    `supports` is an iterable of sets of variable names.  An empty support is
    uncoverable and yields no covers; an empty collection is covered by the
    empty set.
    """
    context = tuple(context)
    if len(context) > DEFAULT_MAX_VARS:
        raise ValueError(f"context has {len(context)} variables, cap is {DEFAULT_MAX_VARS}")
    supports = [frozenset(s) for s in supports]
    if any(not s for s in supports):
        return ()
    covers = []
    for size in range(len(context) + 1):
        for combo in combinations(context, size):
            cand = frozenset(combo)
            if any(c <= cand for c in covers):
                continue
            if all(cand & s for s in supports):
                covers.append(cand)
    return tuple(covers)
