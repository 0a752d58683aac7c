"""Bounded complexes of free modules over the integers.

Homology is computed exactly through Smith reduction, and the Koszul complex
of an integer sequence is built with the contraction differential

    d(e_{j_1 < ... < j_i}) = sum_k (-1)^(k+1) x_{j_k} e_{... without j_k ...}

which is fixed once and for all so outputs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd

from .intlinalg import IntMatrix, kernel_basis, solve
from .spectrum import SpecSubset, Z_BACKEND
from .zmodules import IdealZ, ZModule, from_presentation, supp, v_of_ideal


@dataclass(frozen=True)
class FreeComplex:
    """A bounded complex of free modules given by integer differentials.

    ranks[k] is the rank in degree bottom_degree + k and differentials[k]
    maps degree bottom_degree + k + 1 into degree bottom_degree + k.
    """

    bottom_degree: int
    ranks: tuple[int, ...]
    differentials: tuple[IntMatrix, ...]

    def __post_init__(self):
        if len(self.differentials) != max(len(self.ranks) - 1, 0):
            raise ValueError("need exactly one differential per adjacent pair")
        for k, d in enumerate(self.differentials):
            if d.shape != (self.ranks[k], self.ranks[k + 1]):
                raise ValueError(
                    f"differential {k} has shape {d.shape}, "
                    f"expected {(self.ranks[k], self.ranks[k + 1])}"
                )
        for k in range(len(self.differentials) - 1):
            if not (self.differentials[k] @ self.differentials[k + 1]).is_zero():
                raise ValueError("consecutive differentials do not compose to zero")

    @property
    def top_degree(self) -> int:
        return self.bottom_degree + len(self.ranks) - 1

    def rank_in(self, degree: int) -> int:
        k = degree - self.bottom_degree
        if 0 <= k < len(self.ranks):
            return self.ranks[k]
        return 0

    def differential(self, degree: int) -> IntMatrix:
        """The map out of `degree` into `degree - 1`, zero outside support."""
        k = degree - self.bottom_degree
        if 1 <= k < len(self.ranks):
            return self.differentials[k - 1]
        return IntMatrix.zeros(self.rank_in(degree - 1), self.rank_in(degree))

    def degrees(self):
        return range(self.bottom_degree, self.top_degree + 1)


def koszul_complex(sequence) -> FreeComplex:
    """The exterior-algebra Koszul complex of an integer sequence."""
    xs = [int(x) for x in sequence]
    if not xs:
        raise ValueError("Koszul complex of an empty sequence")
    r = len(xs)
    bases = [list(combinations(range(r), i)) for i in range(r + 1)]
    index = [{sub: k for k, sub in enumerate(level)} for level in bases]
    diffs = []
    for i in range(1, r + 1):
        rows, cols = len(bases[i - 1]), len(bases[i])
        mat = [[0] * cols for _ in range(rows)]
        for col, sub in enumerate(bases[i]):
            for k, j in enumerate(sub):
                face = sub[:k] + sub[k + 1:]
                sign = 1 if k % 2 == 0 else -1
                mat[index[i - 1][face]][col] += sign * xs[j]
        diffs.append(IntMatrix(mat, rows=rows, cols=cols))
    return FreeComplex(0, tuple(len(level) for level in bases), tuple(diffs))


def homology(complex_: FreeComplex, degree: int) -> ZModule:
    """ker(d_degree) / im(d_degree+1) in canonical form."""
    if degree < complex_.bottom_degree or degree > complex_.top_degree:
        return ZModule.zero()
    out = complex_.differential(degree)
    into = complex_.differential(degree + 1)
    cycles = kernel_basis(out)
    x = solve(cycles, into)
    if x is None:
        raise ValueError("boundaries escape the cycle lattice (d*d != 0?)")
    return from_presentation(x)


def homology_table(complex_: FreeComplex) -> dict[int, ZModule]:
    return {i: homology(complex_, i) for i in complex_.degrees()}


def complex_support(complex_: FreeComplex) -> SpecSubset:
    out = SpecSubset.empty(Z_BACKEND)
    for i in complex_.degrees():
        out = out.join(supp(homology(complex_, i)))
    return out


def thick_member(complex_: FreeComplex, subset: SpecSubset) -> bool:
    """Whether every homology module is supported inside the closed subset."""
    if subset.backend != Z_BACKEND:
        raise ValueError("perfect complexes live over the integer backend")
    if not subset.is_specialization_closed():
        raise ValueError("membership criterion needs a specialization-closed subset")
    return all(
        supp(homology(complex_, i)).leq(subset) for i in complex_.degrees()
    )


def _annihilated_by(n: int, m: ZModule) -> bool:
    if n == 0:
        return True
    return m.free_rank == 0 and all(n % d == 0 for d in m.torsion)


@dataclass(frozen=True)
class KoszulCyclicReport:
    """Outcome of checking that K(gens) presents the cyclic module Z/n."""

    modulus: int
    generators: tuple[int, ...]
    homology: tuple[tuple[int, ZModule], ...]
    checks: tuple[tuple[str, bool], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)


def koszul_cyclic_check(n: int, generators) -> KoszulCyclicReport:
    """Build K(generators) and verify it realizes Z/n homologically.

    Checks: degree-zero homology is Z/n; every homology module is killed by
    n; every homology module is supported in the vanishing locus of (n).
    The generators must actually generate (n).
    """
    gens = [int(g) for g in generators]
    if not gens:
        raise ValueError("empty generating set")
    g = 0
    for x in gens:
        g = gcd(g, x)
    if g != n:
        raise ValueError(f"generators span ({g}), not ({n})")
    complex_ = koszul_complex(gens)
    table = homology_table(complex_)
    locus = v_of_ideal(IdealZ(n))
    checks = (
        ("h0_is_cyclic", table[0] == ZModule.cyclic(n)),
        ("homology_killed_by_modulus",
         all(_annihilated_by(n, h) for h in table.values())),
        ("support_in_vanishing_locus",
         all(supp(h).leq(locus) for h in table.values())),
    )
    return KoszulCyclicReport(
        modulus=n,
        generators=tuple(gens),
        homology=tuple(sorted(table.items())),
        checks=checks,
    )


def change_basis(complex_: FreeComplex, transforms) -> FreeComplex:
    """Conjugate each degree by a unimodular basis change (for testing).

    transforms[k] is the new-basis matrix in degree bottom_degree + k; the
    differentials become P_{k}^(-1) d P_{k+1}.
    """
    from .intlinalg import invert_unimodular

    transforms = list(transforms)
    if len(transforms) != len(complex_.ranks):
        raise ValueError("one transform per degree required")
    new_diffs = []
    for k, d in enumerate(complex_.differentials):
        new_diffs.append(invert_unimodular(transforms[k]) @ d @ transforms[k + 1])
    return FreeComplex(complex_.bottom_degree, complex_.ranks, tuple(new_diffs))
