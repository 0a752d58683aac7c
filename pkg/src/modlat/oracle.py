"""Brute-force verification over finite universes of integer modules.

The oracle enumerates a finite universe of isomorphism classes, computes
genuine closures of generator sets under chosen operations, and produces
replayable derivation witnesses for submodule membership.

Torsion parts are handled by complete element-level enumeration (subgroups,
homomorphism images, extension cocycles); free parts are handled by the
structural reductions documented on each operation.  Results of an operation
that land outside the universe are discarded and recorded through a clip
flag, never silently.  Universes are closed under subgroups and under
sub-multisets of primary factors, which is what makes the universe-restricted
fixed points meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import gcd

from . import zmodules
from .intlinalg import (
    IntMatrix,
    column_basis,
    hstack,
    invert_unimodular,
    kernel_basis,
    snf,
    solve,
)
from .zmodules import ZModule, ZModuleMap, direct_sum, presentation_matrix

TORSION_ORDER_CAP = 2 ** 14
CLOSURE_KINDS = (
    "subobjects",
    "quotients",
    "extensions",
    "finite_sums",
    "kernels",
    "cokernels",
    "summands",
    "images",
)


class OracleCapError(RuntimeError):
    """A brute-force enumeration exceeded its configured cap."""


@dataclass(frozen=True)
class Universe:
    """A finite family of isomorphism classes of integer modules.

    Members are Z^s + (sum of prime-power cyclics) with s <= max_rank, at
    most max_torsion_factors primary summands, primes from `primes` and
    exponents at most max_exponent.
    """

    primes: tuple[int, ...]
    max_exponent: int
    max_rank: int
    max_torsion_factors: int
    class_cap: int = 5000

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(sorted(set(self.primes))))

    def prime_powers(self) -> tuple[int, ...]:
        return tuple(
            p ** e
            for p in self.primes
            for e in range(1, self.max_exponent + 1)
        )

    def members(self) -> tuple[ZModule, ...]:
        return _enumerate_universe(self)

    def max_torsion_order(self) -> int:
        if not self.primes:
            return 1
        return (max(self.primes) ** self.max_exponent) ** self.max_torsion_factors

    def __contains__(self, module: ZModule) -> bool:
        if module.free_rank > self.max_rank:
            return False
        factors = module.primary_factors()
        if len(factors) > self.max_torsion_factors:
            return False
        return all(p in self.primes and e <= self.max_exponent for p, e in factors)


@lru_cache(maxsize=None)
def _enumerate_universe(universe: Universe) -> tuple[ZModule, ...]:
    powers = universe.prime_powers()
    torsions = {()}
    frontier = {()}
    for _ in range(universe.max_torsion_factors):
        frontier = {
            tuple(sorted(t + (pw,))) for t in frontier for pw in powers
        }
        torsions |= frontier
    out = []
    for rank in range(universe.max_rank + 1):
        for t in torsions:
            out.append(ZModule.from_cyclic_orders(rank, t))
    out = sorted(set(out), key=lambda m: (m.free_rank, len(m.torsion), m.torsion))
    if len(out) > universe.class_cap:
        raise OracleCapError(
            f"universe has {len(out)} classes, cap is {universe.class_cap}"
        )
    return tuple(out)


def enumerate_universe(universe: Universe) -> tuple[ZModule, ...]:
    return universe.members()


# -- element-level machinery for finite torsion parts -----------------------


@lru_cache(maxsize=None)
def _elements(orders: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    total = 1
    for d in orders:
        total *= d
    if total > TORSION_ORDER_CAP:
        raise OracleCapError(f"torsion order {total} above cap {TORSION_ORDER_CAP}")
    return tuple(product(*(range(d) for d in orders)))

def _add(orders, a, b):
    return tuple((x + y) % d for x, y, d in zip(a, b, orders))


def _scale(orders, c, a):
    return tuple((c * x) % d for x, d in zip(a, orders))


def _span(orders: tuple[int, ...], gens) -> frozenset:
    zero = (0,) * len(orders)
    seen = {zero}
    frontier = [zero]
    gens = list(gens)
    while frontier:
        cur = frontier.pop()
        for g in gens:
            nxt = _add(orders, cur, g)
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return frozenset(seen)


@lru_cache(maxsize=None)
def _all_subgroups(orders: tuple[int, ...]) -> tuple[frozenset, ...]:
    """Every subgroup of the finite group with the given cyclic orders."""
    elements = _elements(orders)
    zero_sub = frozenset({(0,) * len(orders)})
    found = {zero_sub}
    frontier = [zero_sub]
    while frontier:
        sub = frontier.pop()
        for x in elements:
            if x in sub:
                continue
            bigger = _span(orders, set(sub) | {x})
            if bigger not in found:
                found.add(bigger)
                frontier.append(bigger)
    return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))


def _lift_columns(orders, elements) -> IntMatrix:
    return IntMatrix.from_columns([list(e) for e in elements], rows=len(orders))


@lru_cache(maxsize=None)
def _subgroup_type_cached(orders: tuple[int, ...], subgroup: frozenset) -> ZModule:
    if not orders:
        return ZModule.zero()
    rel = IntMatrix.diagonal(orders)
    lat = column_basis(hstack(_lift_columns(orders, sorted(subgroup)), rel))
    x = solve(lat, rel)
    if x is None:
        raise AssertionError("relation lattice escaped the subgroup lattice")
    return zmodules.from_presentation(x)


def _subgroup_type(orders, subgroup) -> ZModule:
    return _subgroup_type_cached(tuple(orders), frozenset(subgroup))


@lru_cache(maxsize=None)
def _quotient_type_cached(orders: tuple[int, ...], subgroup: frozenset) -> ZModule:
    if not orders:
        return ZModule.zero()
    rel = IntMatrix.diagonal(orders)
    return zmodules.from_presentation(
        hstack(_lift_columns(orders, sorted(subgroup)), rel)
    )


def _quotient_type(orders, subgroup) -> ZModule:
    return _quotient_type_cached(tuple(orders), frozenset(subgroup))


@lru_cache(maxsize=None)
def _hom_image_subgroups(src: tuple[int, ...], tgt: tuple[int, ...]) -> tuple[frozenset, ...]:
    """Image subgroups of all homomorphisms between the two torsion groups."""
    elements = _elements(tgt)
    candidates = []
    for d in src:
        candidates.append([e for e in elements if _scale(tgt, d, e) == (0,) * len(tgt)])
    images = set()
    for assignment in product(*candidates):
        images.add(_span(tgt, assignment))
    return tuple(images)


@lru_cache(maxsize=None)
def surjects_onto(source: ZModule, target: ZModule) -> bool:
    """Whether some surjection source -> target exists.

    Z^s + T_B is a quotient of Z^r + T exactly when s <= r and Z^(r-s) + T
    surjects onto T_B; the torsion side is decided by complete enumeration of
    homomorphism images, the free generators then need to cover a quotient
    with at most r - s minimal generators.
    """
    if target.is_zero():
        return True
    if target.free_rank > source.free_rank:
        return False
    spare = source.free_rank - target.free_rank
    tgt_orders = target.torsion
    if not tgt_orders:
        return True
    for image in _hom_image_subgroups(source.torsion, tgt_orders):
        residue = _quotient_type(tgt_orders, image)
        if residue.generator_count <= spare:
            return True
    return False


# -- operation tables --------------------------------------------------------


@lru_cache(maxsize=None)
def subobject_types(module: ZModule) -> frozenset:
    """Isomorphism classes of subgroups: free rank up to the ambient rank,
    torsion part any subgroup type of the ambient torsion."""
    torsion_types = {
        _subgroup_type(module.torsion, sub)
        for sub in _all_subgroups(module.torsion)
    }
    return frozenset(
        direct_sum(ZModule.free(j), t)
        for j in range(module.free_rank + 1)
        for t in torsion_types
    )


@lru_cache(maxsize=None)
def quotient_types(module: ZModule, universe: Universe) -> frozenset:
    """Quotient classes of `module` that lie in the universe.

    A module with free part has quotients of arbitrarily large torsion, so
    the answer is inherently universe-relative: each candidate is decided
    exactly by `surjects_onto`.
    """
    return frozenset(n for n in universe.members() if surjects_onto(module, n))


@lru_cache(maxsize=None)
def summand_types(module: ZModule) -> frozenset:
    factors = module.primary_factors()
    out = set()
    for rank in range(module.free_rank + 1):
        for size in range(len(factors) + 1):
            for combo in combinations(range(len(factors)), size):
                orders = [factors[i][0] ** factors[i][1] for i in combo]
                out.add(ZModule.from_cyclic_orders(rank, orders))
    return frozenset(out)


@lru_cache(maxsize=None)
def kernel_types(source: ZModule, target: ZModule) -> frozenset:
    """Kernel classes of all maps source -> target.

    A kernel splits as Z^(r - rank of the free block) + ker(torsion block);
    the free block rank takes every value up to min of the free ranks, and
    torsion kernels are enumerated completely.
    """
    torsion_kernels = set()
    src_orders, tgt_orders = source.torsion, target.torsion
    elements = _elements(tgt_orders)
    candidates = []
    for d in src_orders:
        candidates.append(
            [e for e in elements if _scale(tgt_orders, d, e) == (0,) * len(tgt_orders)]
        )
    zero_t = (0,) * len(tgt_orders)
    for assignment in product(*candidates):
        kernel_elems = [
            e for e in _elements(src_orders)
            if _image_of(src_orders, tgt_orders, assignment, e) == zero_t
        ]
        torsion_kernels.add(_subgroup_type(src_orders, frozenset(kernel_elems)))
    out = set()
    for rk in range(min(source.free_rank, target.free_rank) + 1):
        for t in torsion_kernels:
            out.add(direct_sum(ZModule.free(source.free_rank - rk), t))
    return frozenset(out)


def _image_of(src_orders, tgt_orders, assignment, element):
    out = (0,) * len(tgt_orders)
    for coeff, gen_image in zip(element, assignment):
        out = _add(tgt_orders, out, _scale(tgt_orders, coeff, gen_image))
    return out


@lru_cache(maxsize=None)
def image_types(source: ZModule, target: ZModule) -> frozenset:
    """Image classes of maps source -> target: subgroup types of the target
    that are also epimorphic images of the source."""
    return frozenset(
        t for t in subobject_types(target) if surjects_onto(source, t)
    )


@lru_cache(maxsize=None)
def cokernel_types(source: ZModule, target: ZModule,
                   universe: Universe) -> tuple[frozenset, bool]:
    """Cokernel classes of maps source -> target that lie in the universe.

    The image of a map is a subgroup of the target that the source surjects
    onto, so cokernels are quotients of the target by such subgroups.  For a
    target of free rank 1 the subgroups split into the finite ones (inside
    the torsion part) and the ones with infinite cyclic projection, indexed
    by the projection generator d; in-universe quotients bound d, and the
    truncation is reported through the clip flag.  Targets of free rank >= 2
    are outside the oracle's scope.
    """
    if target.free_rank > 1:
        raise OracleCapError("cokernel enumeration supports target free rank <= 1")
    out = set()
    clipped = False
    tgt_orders = target.torsion
    rel = IntMatrix.diagonal(tgt_orders) if tgt_orders else IntMatrix.zeros(0, 0)
    subgroups = _all_subgroups(tgt_orders)
    if target.free_rank == 0:
        for sub in subgroups:
            if surjects_onto(source, _subgroup_type(tgt_orders, sub)):
                out.add(_quotient_type(tgt_orders, sub))
        return frozenset(out), clipped
    # target = Z + torsion, generators: torsion gens then the free one
    k = len(tgt_orders)
    tsize = 1
    for d in tgt_orders:
        tsize *= d
    bound = universe.max_torsion_order()
    for sub in subgroups:
        sub_type = _subgroup_type(tgt_orders, sub)
        index = tsize // len(sub)
        # purely torsion image subgroup: quotient keeps the free generator
        if surjects_onto(source, sub_type):
            q = direct_sum(ZModule.free(1), _quotient_type(tgt_orders, sub))
            if q in universe:
                out.add(q)
            else:
                clipped = True
        # image subgroups with projection dZ: abstractly Z + subgroup
        if not surjects_onto(source, direct_sum(ZModule.free(1), sub_type)):
            continue
        clipped = True  # arbitrarily large d escape the universe
        d = 1
        while d * index <= bound:
            for rep in _coset_reps(tgt_orders, sub):
                cols = [list(rep) + [d]]
                cols.extend(list(e) + [0] for e in sorted(sub))
                gens_matrix = IntMatrix.from_columns(cols, rows=k + 1)
                rel_full = vstack_pad(rel, k + 1)
                q = zmodules.from_presentation(hstack(gens_matrix, rel_full))
                if q in universe:
                    out.add(q)
            d += 1
    return frozenset(out), clipped


def vstack_pad(rel: IntMatrix, rows: int) -> IntMatrix:
    """Extend a relations block with zero rows for trailing free generators."""
    data = [list(r) for r in rel.data]
    while len(data) < rows:
        data.append([0] * rel.cols)
    return IntMatrix(data, rows=rows, cols=rel.cols)


def _coset_reps(orders, subgroup) -> list:
    reps = []
    seen = set()
    for e in _elements(orders):
        if e in seen:
            continue
        reps.append(e)
        seen.update(_add(orders, e, s) for s in subgroup)
    return reps


@lru_cache(maxsize=None)
def _unit_orbit_reps(moduli: tuple[int, ...], c: int) -> tuple:
    """Representatives of sub/(c*sub) modulo unit scaling.

    Scaling a quotient generator of order c by a unit is an automorphism and
    multiplies the cocycle value by that unit, so one representative per
    scaling orbit suffices.
    """
    units = [u for u in range(1, c) if gcd(u, c) == 1]
    seen = set()
    reps = []
    for vec in product(*(range(m) for m in moduli)):
        if vec in seen:
            continue
        reps.append(vec)
        seen.update(
            tuple((u * x) % m for x, m in zip(vec, moduli)) for u in units
        )
    return tuple(reps)


def _cocycle_tuples(a_orders, c_tors):
    """Cocycle tuples covering every extension class up to equivalence.

    The value for a quotient generator of order c lives in sub/(c*sub).
    The first value of each equal-order run is reduced modulo unit scaling;
    later values in the run are reduced modulo the combined action of unit
    scalings and shears by the earlier generators of the run (both are
    automorphisms of the quotient).
    """
    if not c_tors:
        yield ()
        return
    all_vectors = {}
    moduli_for = {}
    for c in set(c_tors):
        moduli = tuple(c if o == 0 else gcd(o, c) for o in a_orders)
        moduli_for[c] = moduli
        all_vectors[c] = tuple(product(*(range(m) for m in moduli)))

    def residues(prefix, index):
        c = c_tors[index]
        moduli = moduli_for[c]
        run = [prefix[j] for j in range(index) if c_tors[j] == c]
        if not run:
            return _unit_orbit_reps(moduli, c)
        units = [u for u in range(1, c) if gcd(u, c) == 1]
        shear_span = {(0,) * len(moduli)}
        for base in run:
            shear_span = {
                tuple((s[i] + t * base[i]) % moduli[i] for i in range(len(moduli)))
                for s in shear_span
                for t in range(c)
            }
        seen = set()
        reps = []
        for vec in all_vectors[c]:
            if vec in seen:
                continue
            reps.append(vec)
            for u in units:
                scaled = tuple((u * x) % m for x, m in zip(vec, moduli))
                seen.update(
                    tuple((scaled[i] + s[i]) % moduli[i] for i in range(len(moduli)))
                    for s in shear_span
                )
        return tuple(reps)

    def rec(prefix):
        index = len(prefix)
        if index == len(c_tors):
            yield tuple(prefix)
            return
        for vec in residues(prefix, index):
            prefix.append(vec)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


@lru_cache(maxsize=None)
def extension_types(sub: ZModule, quotient: ZModule) -> frozenset:
    """Middle-term classes of all extensions of `quotient` by `sub`.

    Extensions are enumerated through cocycle data: each torsion generator of
    the quotient, of order c, picks its lifted relation value in sub/(c*sub),
    reduced modulo quotient automorphisms.  The resulting presentation is
    canonicalized; the split sum is always among the results.
    """
    a_orders = sub.generator_orders
    c_tors = quotient.torsion
    ga, gc = sub.generator_count, quotient.generator_count
    ka, kc = len(sub.torsion), len(c_tors)

    out = set()
    for eps in _cocycle_tuples(a_orders, c_tors):
        rows = []
        for i in range(ga + gc):
            row = []
            for j in range(ka):
                row.append(sub.torsion[j] if i == j else 0)
            for j in range(kc):
                if i < ga:
                    row.append(eps[j][i])
                else:
                    row.append(c_tors[j] if (i - ga) == j else 0)
            rows.append(row)
        pres = IntMatrix(rows, rows=ga + gc, cols=ka + kc)
        out.add(zmodules.from_presentation(pres))
    return frozenset(out)


# -- closures ---------------------------------------------------------------


@dataclass(frozen=True)
class ClosureResult:
    members: frozenset
    clipped: bool
    iterations: int


def close(generators, kinds, universe: Universe,
          max_iterations: int = 10_000) -> ClosureResult:
    """Least subset of the universe containing the generators and stable
    under the chosen operations (restricted to the universe).

    The zero module is always included: every subcategory described here is
    nonempty and replete.  The clip flag reports that some exactly-computed
    operation result fell outside the universe and was discarded.
    """
    kinds = frozenset(kinds)
    unknown = kinds - set(CLOSURE_KINDS)
    if unknown:
        raise ValueError(f"unknown closure kinds: {sorted(unknown)}")
    current = {ZModule.zero()}
    for g in generators:
        if g not in universe:
            raise ValueError(f"generator {g} lies outside the universe")
        current.add(g)
    clipped = False
    iterations = 0
    changed = True
    while changed:
        iterations += 1
        if iterations > max_iterations:
            raise OracleCapError("closure fixed point exceeded the iteration cap")
        produced = set()
        snapshot = sorted(current, key=lambda m: (m.free_rank, m.torsion))
        for kind in kinds:
            if kind == "subobjects":
                for m in snapshot:
                    produced |= subobject_types(m)
            elif kind == "quotients":
                for m in snapshot:
                    produced |= quotient_types(m, universe)
            elif kind == "summands":
                for m in snapshot:
                    produced |= summand_types(m)
            elif kind == "finite_sums":
                for a in snapshot:
                    for b in snapshot:
                        s = direct_sum(a, b)
                        if s in universe:
                            produced.add(s)
                        else:
                            clipped = True
            elif kind == "extensions":
                for a in snapshot:
                    for c in snapshot:
                        for mid in extension_types(a, c):
                            if mid in universe:
                                produced.add(mid)
                            else:
                                clipped = True
            elif kind == "kernels":
                for a in snapshot:
                    for b in snapshot:
                        produced |= kernel_types(a, b)
            elif kind == "cokernels":
                for a in snapshot:
                    for b in snapshot:
                        types, over = cokernel_types(a, b, universe)
                        produced |= types
                        clipped |= over
            elif kind == "images":
                for a in snapshot:
                    for b in snapshot:
                        produced |= image_types(a, b)
        fresh = produced - current
        changed = bool(fresh)
        current |= fresh
    return ClosureResult(frozenset(current), clipped, iterations)


def check_closed(subset, kind: str, universe: Universe):
    """Verify closure of `subset` under one operation, within the universe.

    Returns (True, None) or (False, counterexample) where the counterexample
    names the inputs and the escaping module class.
    """
    subset = frozenset(subset)
    ordered = sorted(subset, key=lambda m: (m.free_rank, m.torsion))
    if kind == "subobjects":
        for m in ordered:
            for t in sorted(subobject_types(m), key=str):
                if t not in subset:
                    return False, ((m,), t)
    elif kind == "quotients":
        for m in ordered:
            for t in sorted(quotient_types(m, universe), key=str):
                if t not in subset:
                    return False, ((m,), t)
    elif kind == "summands":
        for m in ordered:
            for t in sorted(summand_types(m), key=str):
                if t not in subset:
                    return False, ((m,), t)
    elif kind == "finite_sums":
        for a in ordered:
            for b in ordered:
                s = direct_sum(a, b)
                if s in universe and s not in subset:
                    return False, ((a, b), s)
    elif kind == "extensions":
        for a in ordered:
            for c in ordered:
                for t in sorted(extension_types(a, c), key=str):
                    if t in universe and t not in subset:
                        return False, ((a, c), t)
    elif kind == "kernels":
        for a in ordered:
            for b in ordered:
                for t in sorted(kernel_types(a, b), key=str):
                    if t not in subset:
                        return False, ((a, b), t)
    elif kind == "cokernels":
        for a in ordered:
            for b in ordered:
                types, _ = cokernel_types(a, b, universe)
                for t in sorted(types, key=str):
                    if t not in subset:
                        return False, ((a, b), t)
    elif kind == "images":
        for a in ordered:
            for b in ordered:
                for t in sorted(image_types(a, b), key=str):
                    if t not in subset:
                        return False, ((a, b), t)
    else:
        raise ValueError(f"unknown closure kind {kind!r}")
    return True, None


# -- explicit subgroups and derivation traces --------------------------------


class _Subgroup:
    """A subgroup of a canonical module, as a lattice over its generators."""

    def __init__(self, ambient: ZModule, basis: IntMatrix):
        self.ambient = ambient
        self.basis = basis

    @classmethod
    def from_generators(cls, ambient: ZModule, gens: IntMatrix) -> "_Subgroup":
        if gens.rows != ambient.generator_count:
            raise ValueError(
                f"elements need {ambient.generator_count} coordinates, got {gens.rows}"
            )
        lattice = column_basis(hstack(gens, presentation_matrix(ambient)))
        return cls(ambient, lattice)

    def contains(self, column: IntMatrix) -> bool:
        return solve(self.basis, column) is not None

    def with_element(self, column: IntMatrix) -> "_Subgroup":
        return _Subgroup(
            self.ambient, column_basis(hstack(self.basis, column))
        )

    def is_full(self) -> bool:
        g = self.ambient.generator_count
        return self.contains(IntMatrix.identity(g))

    def colon(self, column: IntMatrix) -> int:
        """Nonnegative generator of {a : a * column lies in the subgroup}."""
        ker = kernel_basis(hstack(column, self.basis))
        d = 0
        for j in range(ker.cols):
            d = gcd(d, ker.data[0][j])
        return abs(d)

    def module_type(self) -> ZModule:
        return self.canonical_generators()[0]

    def canonical_generators(self):
        """Canonical form plus matching generator columns in ambient coordinates.

        Returned generators follow the module convention: torsion generators
        ascending, then free generators.
        """
        rel = presentation_matrix(self.ambient)
        x = solve(self.basis, rel)
        if x is None:
            raise AssertionError("ambient relations escaped the subgroup lattice")
        dec = snf(x)
        u_inv = invert_unimodular(dec.u)
        diag = dec.diagonal()
        t = x.rows
        torsion_cols = []
        free_cols = []
        for i in range(t):
            d = diag[i] if i < len(diag) else 0
            col = IntMatrix.from_columns([u_inv.column(i)], rows=t)
            if d == 1:
                continue
            if d == 0:
                free_cols.append(col)
            else:
                torsion_cols.append((d, col))
        torsion_cols.sort(key=lambda pair: pair[0])
        module = ZModule(len(free_cols), tuple(d for d, _ in torsion_cols))
        columns = [self.basis @ col for _, col in torsion_cols]
        columns += [self.basis @ col for col in free_cols]
        return module, columns


def subgroup_type(ambient: ZModule, gens: IntMatrix) -> ZModule:
    """Isomorphism class of the subgroup generated by the given elements."""
    return _Subgroup.from_generators(ambient, gens).module_type()


@dataclass(frozen=True)
class TraceStep:
    """One replayable derivation step.

    op is one of start | kernel | cokernel | summand | finite_sum; inputs
    reference earlier steps.  A summand step stores the idempotent-style
    endomorphism whose kernel extracts the summand, so replay runs it as a
    kernel.
    """

    op: str
    inputs: tuple[int, ...]
    matrix: IntMatrix | None
    result: ZModule


class ReplayError(RuntimeError):
    pass


@dataclass(frozen=True)
class DerivationTrace:
    ambient: ZModule
    steps: tuple[TraceStep, ...]

    @property
    def target(self) -> ZModule:
        return self.steps[-1].result

    def replay(self) -> ZModule:
        """Re-execute every step and verify the stored results."""
        results: list[ZModule] = []
        for idx, step in enumerate(self.steps):
            if step.op == "start":
                value = self.ambient
            elif step.op == "kernel":
                src = results[step.inputs[0]]
                tgt = results[step.inputs[1]]
                value = zmodules.kernel(ZModuleMap(src, tgt, step.matrix))
            elif step.op == "summand":
                src = results[step.inputs[0]]
                value = zmodules.kernel(ZModuleMap(src, src, step.matrix))
            elif step.op == "cokernel":
                src = results[step.inputs[0]]
                value = zmodules.cokernel(ZModuleMap(src, src, step.matrix))
            elif step.op == "finite_sum":
                value = direct_sum(*(results[i] for i in step.inputs))
            else:
                raise ReplayError(f"unknown op {step.op!r} at step {idx}")
            if value != step.result:
                raise ReplayError(
                    f"step {idx} ({step.op}) produced {value}, trace says {step.result}"
                )
            results.append(value)
        return results[-1]


def derive_submodule(ambient: ZModule, gens: IntMatrix) -> DerivationTrace:
    """Constructive witness that a subgroup's class is derivable from the
    ambient module using kernels, cokernels and summand extraction.

    The subgroup is given by generator columns in ambient coordinates.  The
    witness ascends the chain M < M + Z*x < ... < ambient, adding at each
    stage the first canonical generator still missing, then derives each
    stage from the next: with d generating (stage : x), the cyclic module
    Z/d appears as a summand of stage/(d*stage) (a cokernel), and the
    previous stage is the kernel of the induced map onto it.
    """
    sub = _Subgroup.from_generators(ambient, gens)
    g = ambient.generator_count

    chain: list[tuple[_Subgroup, IntMatrix | None]] = [(sub, None)]
    current = sub
    while not current.is_full():
        x = None
        for i in range(g):
            col = IntMatrix.from_columns(
                [[1 if r == i else 0 for r in range(g)]], rows=g
            )
            if not current.contains(col):
                x = col
                break
        if x is None:
            raise AssertionError("proper subgroup contains every generator")
        current = current.with_element(x)
        chain.append((current, x))

    steps = [TraceStep("start", (), None, ambient)]
    current_idx = 0
    for pos in range(len(chain) - 1, 0, -1):
        stage, x = chain[pos]
        below, _ = chain[pos - 1]
        stage_type, stage_gens = stage.canonical_generators()
        d = below.colon(x)
        if d == 0:
            # stage/below is infinite cyclic: extract a free summand
            kill = stage_type.generator_count - 1
            endo = _killing_endo(stage_type, kill)
            steps.append(TraceStep("summand", (current_idx,), endo, ZModule.free(1)))
            quotient_idx = len(steps) - 1
            quotient_type = ZModule.free(1)
        else:
            endo = zmodules.scalar_map(d, stage_type).matrix
            q = zmodules.cokernel(ZModuleMap(stage_type, stage_type, endo))
            steps.append(TraceStep("cokernel", (current_idx,), endo, q))
            quotient_type = ZModule.cyclic(d)
            if q == quotient_type:
                quotient_idx = len(steps) - 1
            else:
                kill = len(q.torsion) - 1  # the factor of order exactly d
                steps.append(TraceStep(
                    "summand", (len(steps) - 1,), _killing_endo(q, kill), quotient_type
                ))
                quotient_idx = len(steps) - 1
        coeffs = _projection_coefficients(below, x, stage_gens, d)
        pi = IntMatrix([coeffs], rows=1, cols=stage_type.generator_count)
        below_type = below.module_type()
        steps.append(TraceStep(
            "kernel", (current_idx, quotient_idx), pi, below_type
        ))
        current_idx = len(steps) - 1
    return DerivationTrace(ambient, tuple(steps))


def _killing_endo(module: ZModule, index: int) -> IntMatrix:
    g = module.generator_count
    rows = [[1 if (i == j and i != index) else 0 for j in range(g)] for i in range(g)]
    return IntMatrix(rows, rows=g, cols=g)


def _projection_coefficients(below: _Subgroup, x: IntMatrix, stage_gens, d: int):
    """Coefficients of the map onto stage/below = Z/d (or Z when d = 0),
    evaluated on the stage's canonical generators: v = (element of below)
    + a * x determines a modulo d."""
    system = hstack(x, below.basis)
    coeffs = []
    for col in stage_gens:
        sol = solve(system, col)
        if sol is None:
            raise AssertionError("stage generator escaped stage = below + Z*x")
        a = sol.data[0][0]
        coeffs.append(a % d if d else a)
    return coeffs
