"""Finitely generated modules over the integers.

A module is kept in canonical form: a free rank plus the chain of invariant
factors of its torsion part.  Equality of canonical forms is isomorphism, so
every construction (kernels, cokernels, Hom, Ext, filtrations) normalizes its
result through Smith reduction or through closed formulas on the canonical
pieces.

Generator convention used by maps and presentations: torsion generators come
first, in invariant-factor order, followed by the free generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

from .intlinalg import (
    IntMatrix,
    cokernel_structure,
    column_basis,
    hstack,
    kernel_basis,
    solve,
)
from .spectrum import PrimeId, SpecSubset, Z_BACKEND, v_of_ideal

INFINITY = math.inf


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 by trial division (desk scale)."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(sorted(factorize(n))) if n > 1 else ()


@dataclass(frozen=True)
class IdealZ:
    """The ideal (n) of the integers, canonical nonnegative generator."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("canonical generator must be nonnegative")

    def is_zero(self) -> bool:
        return self.n == 0

    def is_unit(self) -> bool:
        return self.n == 1

    def __str__(self) -> str:
        return f"({self.n})"


@dataclass(frozen=True)
class ZModule:
    """Canonical form of a finitely generated abelian group."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"divisibility chain violated: {a} does not divide {b}")

    @classmethod
    def zero(cls) -> "ZModule":
        return cls(0, ())

    @classmethod
    def free(cls, rank: int) -> "ZModule":
        return cls(rank, ())

    @classmethod
    def cyclic(cls, n: int) -> "ZModule":
        """Z/n, with Z/0 = Z and Z/1 = 0."""
        if n < 0:
            n = -n
        if n == 0:
            return cls(1, ())
        if n == 1:
            return cls(0, ())
        return cls(0, (n,))

    @classmethod
    def from_cyclic_orders(cls, free_rank: int, orders) -> "ZModule":
        """Canonicalize a direct sum of cyclic groups of the given orders."""
        per_prime: dict[int, list[int]] = {}
        for n in orders:
            n = abs(int(n))
            if n == 0:
                free_rank += 1
                continue
            if n == 1:
                continue
            for p, e in factorize(n).items():
                per_prime.setdefault(p, []).append(e)
        if not per_prime:
            return cls(free_rank, ())
        width = max(len(v) for v in per_prime.values())
        factors = []
        for slot in range(width):
            f = 1
            for p, exps in per_prime.items():
                exps = sorted(exps, reverse=True)
                if slot < len(exps):
                    f *= p ** exps[slot]
            factors.append(f)
        return cls(free_rank, tuple(sorted(f for f in factors if f > 1)))

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def generator_count(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def generator_orders(self) -> tuple[int, ...]:
        return self.torsion + (0,) * self.free_rank

    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def primary_factors(self) -> tuple[tuple[int, int], ...]:
        """The multiset of prime-power cyclic summands, as (p, e) pairs."""
        out = []
        for d in self.torsion:
            for p, e in factorize(d).items():
                out.append((p, e))
        return tuple(sorted(out))

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def direct_sum(*modules: ZModule) -> ZModule:
    rank = sum(m.free_rank for m in modules)
    orders = [d for m in modules for d in m.torsion]
    return ZModule.from_cyclic_orders(rank, orders)


def from_presentation(a: IntMatrix) -> ZModule:
    """Cokernel of `a` (rows = generators, columns = relations)."""
    rank, factors = cokernel_structure(a)
    return ZModule(rank, factors)


def presentation_matrix(m: ZModule) -> IntMatrix:
    """Relations of the canonical presentation (one column per torsion factor)."""
    k = len(m.torsion)
    rows = []
    for i in range(m.generator_count):
        rows.append([m.torsion[i] if (i < k and i == j) else 0 for j in range(k)])
    return IntMatrix(rows, rows=m.generator_count, cols=k)


# -- invariants ---------------------------------------------------------


def ann(m: ZModule) -> IdealZ:
    if m.is_zero():
        return IdealZ(1)
    if m.free_rank > 0:
        return IdealZ(0)
    return IdealZ(m.torsion[-1])


def supp(m: ZModule) -> SpecSubset:
    if m.is_zero():
        return SpecSubset.empty(Z_BACKEND)
    if m.free_rank > 0:
        return SpecSubset.whole_spec(Z_BACKEND)
    return SpecSubset.closure(
        [PrimeId.z_maximal(p) for p in prime_divisors(m.torsion[-1])]
    )


def ass(m: ZModule) -> SpecSubset:
    """Associated primes, as an explicit (non-closed) subset."""
    primes = set()
    if m.free_rank > 0:
        primes.add(PrimeId.z_generic())
    if m.torsion:
        primes.update(PrimeId.z_maximal(p) for p in prime_divisors(m.torsion[-1]))
    return SpecSubset.explicit(primes, backend=Z_BACKEND)


def rank(m: ZModule) -> int:
    return m.free_rank


def length(m: ZModule):
    if m.free_rank > 0:
        return INFINITY
    return sum(e for _, e in m.primary_factors())


def dim(m: ZModule):
    """Krull dimension; None for the zero module."""
    if m.is_zero():
        return None
    return 1 if m.free_rank > 0 else 0


def height_ann(m: ZModule):
    """Height of the annihilator ideal; infinite for the zero module."""
    a = ann(m)
    if a.is_unit():
        return INFINITY
    return 0 if a.is_zero() else 1


# -- torsion and grade --------------------------------------------------


def torsion_submodule(ideal: IdealZ, m: ZModule) -> ZModule:
    """Elements annihilated by some power of the ideal.

    Convention for the zero ideal: multiplication by 0 kills everything, so
    the whole module is (0)-torsion.
    """
    if ideal.is_zero():
        return m
    if ideal.is_unit():
        return ZModule.zero()
    keep = [p ** e for p, e in m.primary_factors() if ideal.n % p == 0]
    return ZModule.from_cyclic_orders(0, keep)


def is_torsion(ideal: IdealZ, m: ZModule) -> bool:
    return torsion_submodule(ideal, m) == m


def is_torsionfree(ideal: IdealZ, m: ZModule) -> bool:
    return torsion_submodule(ideal, m).is_zero()


def grade_ideal(ideal: IdealZ, m: ZModule):
    """Least degree where Ext(Z/n, m) is nonzero; values in {0, 1, inf}.

    grade((1), m) = inf by the empty-infimum convention (Z/1 = 0, every Ext
    group vanishes).  For n = 0 the test module is Z itself, so the grade is
    0 exactly when m is nonzero.
    """
    n = ideal.n
    if n == 1:
        return INFINITY
    if n == 0:
        return 0 if not m.is_zero() else INFINITY
    if any(gcd(n, d) > 1 for d in m.torsion):
        return 0
    if m.free_rank > 0:
        return 1
    return INFINITY


def grade_module(n: ZModule, m: ZModule):
    """Least degree where Ext(n, m) is nonzero, for nonzero n."""
    if n.is_zero():
        raise ValueError("grade against the zero module is an empty infimum")
    grades = []
    if n.free_rank > 0:
        grades.append(INFINITY if m.is_zero() else 0)
    grades.extend(grade_ideal(IdealZ(d), m) for d in n.torsion)
    return min(grades)


def is_regular_element(a: int, m: ZModule) -> bool:
    """Whether multiplication by `a` is injective on m."""
    if a == 0:
        return m.is_zero()
    return all(gcd(a, d) == 1 for d in m.torsion)


# -- Hom and Ext --------------------------------------------------------


def hom(m: ZModule, n: ZModule) -> ZModule:
    """Hom(m, n) via the bilinear closed forms for cyclic pieces."""
    free = m.free_rank * n.free_rank
    orders: list[int] = []
    for _ in range(m.free_rank):
        orders.extend(n.torsion)
    for a in m.torsion:
        orders.extend(gcd(a, b) for b in n.torsion)
    return ZModule.from_cyclic_orders(free, orders)


def ext1(m: ZModule, n: ZModule) -> ZModule:
    """Ext^1(m, n): free pieces of m contribute nothing, Z/a contributes n/an."""
    orders: list[int] = []
    for a in m.torsion:
        orders.extend([a] * n.free_rank)
        orders.extend(gcd(a, b) for b in n.torsion)
    return ZModule.from_cyclic_orders(0, orders)


# -- maps ---------------------------------------------------------------


@dataclass(frozen=True)
class ZModuleMap:
    """A homomorphism given on canonical generators.

    matrix[i][j] is the coefficient of target generator i in the image of
    source generator j.  Entries are reduced modulo the target orders on
    construction; a map whose matrix does not respect the source relations is
    rejected.
    """

    source: ZModule
    target: ZModule
    matrix: IntMatrix

    def __post_init__(self):
        gs, gt = self.source.generator_count, self.target.generator_count
        if self.matrix.shape != (gt, gs):
            raise ValueError(f"matrix shape {self.matrix.shape}, expected {(gt, gs)}")
        src_orders = self.source.generator_orders
        tgt_orders = self.target.generator_orders
        reduced = [list(row) for row in self.matrix.data]
        for i in range(gt):
            e = tgt_orders[i]
            if e:
                reduced[i] = [x % e for x in reduced[i]]
        for j in range(gs):
            d = src_orders[j]
            if d == 0:
                continue
            for i in range(gt):
                e = tgt_orders[i]
                val = d * reduced[i][j]
                if (e == 0 and val != 0) or (e != 0 and val % e):
                    raise ValueError(
                        f"relation not respected: order-{d} generator {j} "
                        f"maps outside the target relations"
                    )
        object.__setattr__(self, "matrix", IntMatrix(reduced, rows=gt, cols=gs))


def identity_map(m: ZModule) -> ZModuleMap:
    return ZModuleMap(m, m, IntMatrix.identity(m.generator_count))


def scalar_map(c: int, m: ZModule) -> ZModuleMap:
    g = m.generator_count
    return ZModuleMap(m, m, IntMatrix.identity(g).scale(c))


def _domain_lattice(f: ZModuleMap) -> IntMatrix:
    """Basis of {v in Z^gens(source) : f(v) falls in the target relations}."""
    rel_t = presentation_matrix(f.target)
    big = hstack(f.matrix, rel_t)
    ker = kernel_basis(big)
    gs = f.source.generator_count
    top = IntMatrix([ker.data[i] for i in range(gs)], rows=gs, cols=ker.cols)
    return column_basis(top)


def kernel(f: ZModuleMap) -> ZModule:
    basis = _domain_lattice(f)
    rel_s = presentation_matrix(f.source)
    x = solve(basis, rel_s)
    if x is None:
        raise ValueError("source relations escape the kernel lattice")
    return from_presentation(x)


def cokernel(f: ZModuleMap) -> ZModule:
    return from_presentation(hstack(f.matrix, presentation_matrix(f.target)))


def image(f: ZModuleMap) -> ZModule:
    return from_presentation(_domain_lattice(f))


# -- filtrations and coprimary structure ---------------------------------


def cyclic_filtration(m: ZModule) -> tuple[IdealZ, ...]:
    """Annihilators of the steps of the canonical cyclic filtration.

    Generators are consumed in canonical order (torsion ascending, then
    free); peeling the canonical form one generator at a time makes each
    intermediate quotient another canonical direct sum, so the annihilator
    of step i is simply the i-th generator order.
    """
    return tuple(IdealZ(d) for d in m.generator_orders)


def filtration_steps(m: ZModule) -> tuple[ZModule, ...]:
    """The descending chain of quotients realized by cyclic_filtration."""
    steps = [m]
    orders = list(m.generator_orders)
    while orders:
        orders.pop(0)
        rank = sum(1 for d in orders if d == 0)
        steps.append(ZModule.from_cyclic_orders(rank, [d for d in orders if d]))
    return tuple(steps)


def coprimary_components(m: ZModule) -> tuple[tuple[PrimeId, ZModule], ...]:
    """One coprimary quotient per associated prime.

    The generic component is the free part, the component at (p) is the
    p-primary torsion part; the diagonal map into their sum is injective.
    """
    out = []
    if m.free_rank > 0:
        out.append((PrimeId.z_generic(), ZModule.free(m.free_rank)))
    primary = m.primary_factors()
    for p in sorted({q for q, _ in primary}):
        part = [q ** e for q, e in primary if q == p]
        out.append((PrimeId.z_maximal(p), ZModule.from_cyclic_orders(0, part)))
    return tuple(out)


def coprimary_chain(m: ZModule, prime: PrimeId) -> tuple[ZModule, ...]:
    """The descending chain m >= p*m >= p^2*m >= ... down to zero.

    Each step is the intersection of the kernels of a generating set of
    Hom(step, Z/p); over the integers that intersection is p times the step.
    Requires m to be coprimary at the given maximal prime.
    """
    if prime.kind != "z_maximal":
        raise ValueError("coprimary chains are taken at maximal primes")
    if m.is_zero():
        raise ValueError("the zero module has no associated prime")
    expected = SpecSubset.explicit([prime], backend=Z_BACKEND)
    if ass(m) != expected:
        raise ValueError(f"module is not coprimary at {prime}")
    p = prime.p
    chain = [m]
    current = m
    while not current.is_zero():
        current = ZModule.from_cyclic_orders(0, [d // p for d in current.torsion])
        chain.append(current)
    return tuple(chain)


@v_of_ideal.register
def _(ideal: IdealZ) -> SpecSubset:
    if ideal.is_zero():
        return SpecSubset.whole_spec(Z_BACKEND)
    if ideal.is_unit():
        return SpecSubset.empty(Z_BACKEND)
    return SpecSubset.closure([PrimeId.z_maximal(p) for p in prime_divisors(ideal.n)])
