"""Closure oracle tests.

The extension table is cross-checked by an element-level search over
candidate middle terms (complete for torsion inputs); closures are checked
against the criterion sets they classify.
"""

import random
from itertools import product

import pytest

from modlat import oracle
from modlat.classify import ass_union, supp_union
from modlat.intlinalg import IntMatrix
from modlat.oracle import (
    ClosureResult,
    DerivationTrace,
    OracleCapError,
    Universe,
    check_closed,
    close,
    derive_submodule,
    enumerate_universe,
    extension_types,
    image_types,
    kernel_types,
    quotient_types,
    subgroup_type,
    subobject_types,
    summand_types,
    surjects_onto,
)
from modlat.spectrum import Z_BACKEND
from modlat.zmodules import ZModule, ass, direct_sum, supp

SMALL = Universe(primes=(2,), max_exponent=2, max_rank=1, max_torsion_factors=2)
ACCEPT = Universe(primes=(2, 3), max_exponent=2, max_rank=1, max_torsion_factors=2)


def test_universe_enumeration_examples():
    u = Universe(primes=(2,), max_exponent=1, max_rank=0, max_torsion_factors=1)
    assert [str(m) for m in enumerate_universe(u)] == ["0", "Z/2"]
    u = Universe(primes=(2,), max_exponent=2, max_rank=0, max_torsion_factors=1)
    assert [str(m) for m in enumerate_universe(u)] == ["0", "Z/2", "Z/4"]
    u = Universe(primes=(2,), max_exponent=1, max_rank=1, max_torsion_factors=1)
    assert set(enumerate_universe(u)) == {
        ZModule.zero(), ZModule.cyclic(2), ZModule.free(1),
        ZModule.from_cyclic_orders(1, [2])}


def test_universe_membership():
    assert ZModule.cyclic(12) in ACCEPT          # primary parts {4, 9}... (4,3)
    assert ZModule.cyclic(8) not in ACCEPT       # exponent 3
    assert ZModule.from_cyclic_orders(2, []) not in ACCEPT
    assert ZModule.from_cyclic_orders(0, [2, 2, 2]) not in ACCEPT
    assert ZModule.cyclic(5) not in ACCEPT


def test_universe_cap():
    with pytest.raises(OracleCapError):
        enumerate_universe(Universe(primes=(2, 3, 5, 7), max_exponent=4,
                                    max_rank=2, max_torsion_factors=4,
                                    class_cap=100))


def test_subobject_types_examples():
    assert subobject_types(ZModule.cyclic(4)) == frozenset(
        {ZModule.zero(), ZModule.cyclic(2), ZModule.cyclic(4)})
    assert subobject_types(ZModule.free(1)) == frozenset(
        {ZModule.zero(), ZModule.free(1)})
    sq = ZModule.from_cyclic_orders(0, [2, 2])
    assert subobject_types(sq) == frozenset(
        {ZModule.zero(), ZModule.cyclic(2), sq})


def test_quotient_types_examples():
    assert quotient_types(ZModule.cyclic(4), SMALL) == frozenset(
        {ZModule.zero(), ZModule.cyclic(2), ZModule.cyclic(4)})
    free_quotients = quotient_types(ZModule.free(1), SMALL)
    assert ZModule.cyclic(4) in free_quotients
    assert ZModule.from_cyclic_orders(0, [2, 2]) not in free_quotients
    assert quotient_types(ZModule.zero(), SMALL) == frozenset({ZModule.zero()})


def test_surjections():
    assert surjects_onto(ZModule.free(1), ZModule.cyclic(36))
    assert not surjects_onto(ZModule.cyclic(2), ZModule.cyclic(4))
    assert surjects_onto(ZModule.cyclic(4), ZModule.cyclic(2))
    assert not surjects_onto(ZModule.cyclic(4),
                             ZModule.from_cyclic_orders(0, [2, 2]))
    assert surjects_onto(ZModule.from_cyclic_orders(1, [2]),
                         ZModule.from_cyclic_orders(0, [2, 4]))


def test_extension_types_examples():
    assert extension_types(ZModule.cyclic(2), ZModule.cyclic(2)) == frozenset(
        {ZModule.from_cyclic_orders(0, [2, 2]), ZModule.cyclic(4)})
    assert extension_types(ZModule.free(1), ZModule.free(1)) == frozenset(
        {ZModule.free(2)})
    assert extension_types(ZModule.zero(), ZModule.cyclic(4)) == frozenset(
        {ZModule.cyclic(4)})
    # split sum always present
    a, c = ZModule.from_cyclic_orders(1, [2]), ZModule.cyclic(4)
    assert direct_sum(a, c) in extension_types(a, c)


def middle_terms_oracle(a: ZModule, c: ZModule) -> frozenset:
    """Element-level search for middle terms of torsion extensions.

    Complete for torsion inputs: candidates have order |a|*|c|, and a
    candidate works exactly when it has a subgroup of class `a` with
    quotient of class `c`.
    """
    assert a.free_rank == 0 and c.free_rank == 0
    target_order = a.torsion_order() * c.torsion_order()
    out = set()
    for b in _all_abelian_groups_of_order(target_order):
        orders = b.torsion
        for sub in oracle._all_subgroups(orders):
            if (oracle._subgroup_type(orders, sub) == a
                    and oracle._quotient_type(orders, sub) == c):
                out.add(b)
                break
    return frozenset(out)


def _all_abelian_groups_of_order(n: int) -> list[ZModule]:
    out = []

    def partitions(total):
        if total == 0:
            yield ()
            return
        for first in range(total, 0, -1):
            for rest in partitions(total - first):
                if not rest or first >= rest[0]:
                    yield (first,) + rest

    from modlat.zmodules import factorize

    per_prime = []
    for p, e in sorted(factorize(n).items()) if n > 1 else []:
        per_prime.append([(p, part) for part in partitions(e)])
    if n == 1:
        return [ZModule.zero()]
    for combo in product(*per_prime):
        orders = []
        for p, part in combo:
            orders.extend(p ** e for e in part)
        out.append(ZModule.from_cyclic_orders(0, orders))
    return out


def test_extension_types_against_element_search():
    pool = [ZModule.zero(), ZModule.cyclic(2), ZModule.cyclic(4),
            ZModule.cyclic(3), ZModule.cyclic(6),
            ZModule.from_cyclic_orders(0, [2, 2])]
    for a in pool:
        for c in pool:
            assert extension_types(a, c) == middle_terms_oracle(a, c), (a, c)


def test_kernel_and_image_types():
    kernels = kernel_types(ZModule.cyclic(4), ZModule.cyclic(2))
    assert kernels == frozenset({ZModule.cyclic(2), ZModule.cyclic(4)})
    assert kernel_types(ZModule.free(1), ZModule.free(1)) == frozenset(
        {ZModule.zero(), ZModule.free(1)})
    images = image_types(ZModule.free(1), ZModule.cyclic(4))
    assert images == frozenset(
        {ZModule.zero(), ZModule.cyclic(2), ZModule.cyclic(4)})
    assert image_types(ZModule.cyclic(2), ZModule.cyclic(4)) == frozenset(
        {ZModule.zero(), ZModule.cyclic(2)})


def test_cokernel_types():
    types, clipped = oracle.cokernel_types(ZModule.free(1), ZModule.free(1), SMALL)
    assert ZModule.cyclic(2) in types
    assert ZModule.cyclic(4) in types
    assert ZModule.zero() in types
    assert ZModule.free(1) in types
    assert clipped  # cokernels Z/8, Z/16, ... escape the universe
    types, clipped = oracle.cokernel_types(
        ZModule.cyclic(2), ZModule.cyclic(4), SMALL)
    assert types == frozenset({ZModule.cyclic(4), ZModule.cyclic(2)})
    assert not clipped
    with pytest.raises(OracleCapError):
        oracle.cokernel_types(ZModule.free(1), ZModule.free(2), SMALL)


def test_summand_types():
    m = ZModule.from_cyclic_orders(1, [12])
    got = summand_types(m)
    assert ZModule.cyclic(4) in got
    assert ZModule.cyclic(3) in got
    assert ZModule.free(1) in got
    assert m in got
    assert ZModule.zero() in got
    assert ZModule.cyclic(2) not in got  # Z/2 is not a direct summand of Z/12


def test_close_examples():
    u = Universe(primes=(2,), max_exponent=3, max_rank=0, max_torsion_factors=2)
    result = close([ZModule.cyclic(2)], {"subobjects", "extensions"}, u)
    assert result.members == frozenset(u.members())
    u2 = Universe(primes=(2,), max_exponent=1, max_rank=2, max_torsion_factors=1)
    result = close([ZModule.free(1)], {"subobjects", "extensions"}, u2)
    assert result.members == frozenset(
        {ZModule.zero(), ZModule.free(1), ZModule.free(2)})
    result = close([], {"subobjects", "extensions"}, u2)
    assert result.members == frozenset({ZModule.zero()})
    with pytest.raises(ValueError):
        close([ZModule.cyclic(5)], {"subobjects"}, u2)
    with pytest.raises(ValueError):
        close([], {"frobnicate"}, u2)


def test_close_soundness_sandwich():
    # every member of a closure satisfies the support criterion of the
    # generators, whatever the operation set contains beyond the core four
    rng = random.Random("sandwich")
    members = [m for m in ACCEPT.members() if not m.is_zero()]
    for _ in range(10):
        gens = rng.sample(members, rng.randrange(1, 3))
        result = close(gens, {"kernels", "cokernels", "extensions",
                              "finite_sums"}, ACCEPT)
        target = supp_union(gens, Z_BACKEND)
        for m in result.members:
            assert supp(m).leq(target), (gens, m)


def test_close_matches_criteria_small():
    gens = [ZModule.cyclic(2)]
    result = close(gens, {"subobjects", "quotients", "extensions",
                          "finite_sums"}, ACCEPT)
    expected = frozenset(
        m for m in ACCEPT.members()
        if supp(m).leq(supp_union(gens, Z_BACKEND)))
    assert result.members == expected
    result = close(gens, {"subobjects", "extensions"}, ACCEPT)
    expected = frozenset(
        m for m in ACCEPT.members()
        if ass(m).leq(ass_union(gens, Z_BACKEND)))
    assert result.members == expected


def test_closure_operation_implications():
    # closure laws checked on the oracle's own outputs: extension closure
    # gives finite sums; kernel or cokernel closure gives summands and the
    # zero module; kernel+cokernel closure gives images; subobject+cokernel
    # closure gives quotients
    rng = random.Random("bbasic")
    members = [m for m in ACCEPT.members() if not m.is_zero()]
    for _ in range(6):
        gens = rng.sample(members, 2)
        with_ext = close(gens, {"subobjects", "extensions"}, ACCEPT)
        assert ZModule.zero() in with_ext.members
        ok, counter = check_closed(with_ext.members, "finite_sums", ACCEPT)
        assert ok, counter
        for kind in ("kernels", "cokernels"):
            partial = close(gens, {kind, "finite_sums"}, ACCEPT)
            assert ZModule.zero() in partial.members
            ok, counter = check_closed(partial.members, "summands", ACCEPT)
            assert ok, (kind, counter)
        coherent = close(gens, {"kernels", "cokernels", "extensions",
                                "finite_sums"}, ACCEPT)
        ok, counter = check_closed(coherent.members, "images", ACCEPT)
        assert ok, counter
        sub_coker = close(gens, {"subobjects", "cokernels"}, ACCEPT)
        ok, counter = check_closed(sub_coker.members, "quotients", ACCEPT)
        assert ok, counter


def _all_maps(m, n, free_bound=2):
    """Every well-formed map matrix from m to n (free-to-free entries bounded)."""
    from modlat.zmodules import ZModuleMap

    gs, gt = m.generator_count, n.generator_count
    src, tgt = m.generator_orders, n.generator_orders
    col_choices = []
    for j in range(gs):
        d = src[j]
        rows = []
        for i in range(gt):
            e = tgt[i]
            if d == 0:
                rows.append(tuple(range(e)) if e
                            else tuple(range(-free_bound, free_bound + 1)))
            elif e == 0:
                rows.append((0,))
            else:
                rows.append(tuple(x for x in range(e) if (d * x) % e == 0))
        col_choices.append(list(product(*rows)))
    for cols in product(*col_choices):
        yield ZModuleMap(m, n, IntMatrix.from_columns([list(c) for c in cols],
                                                      rows=gt))


def test_operation_tables_match_explicit_map_enumeration():
    # dual route: the structural kernel/image/cokernel tables against the
    # classes observed over every homomorphism, enumerated explicitly
    from modlat.zmodules import cokernel, image, kernel

    pool = [ZModule.zero(), ZModule.cyclic(2), ZModule.cyclic(4),
            ZModule.cyclic(6), ZModule.from_cyclic_orders(0, [2, 2])]
    for m in pool:
        for n in pool:
            kernels, cokers, images = set(), set(), set()
            for f in _all_maps(m, n):
                kernels.add(kernel(f))
                cokers.add(cokernel(f))
                images.add(image(f))
            assert kernels == set(kernel_types(m, n)), (m, n)
            assert images == set(image_types(m, n)), (m, n)
            types, _ = oracle.cokernel_types(m, n, ACCEPT)
            assert cokers == set(types), (m, n)


def test_operation_tables_cover_maps_with_free_parts():
    free_pool = [ZModule.free(1), ZModule.from_cyclic_orders(1, [2])]
    mixed = free_pool + [ZModule.cyclic(4)]
    for m in mixed:
        for n in mixed:
            for f in _all_maps(m, n, free_bound=3):
                from modlat.zmodules import cokernel, image, kernel
                assert kernel(f) in kernel_types(m, n)
                assert image(f) in image_types(m, n)
                c = cokernel(f)
                if c in ACCEPT:
                    types, _ = oracle.cokernel_types(m, n, ACCEPT)
                    assert c in types


def test_check_closed_counterexample():
    ok, counter = check_closed({ZModule.zero(), ZModule.cyclic(4)},
                               "subobjects", SMALL)
    assert not ok
    inputs, escaped = counter
    assert escaped == ZModule.cyclic(2)
    ok, _ = check_closed({ZModule.zero()}, "subobjects", SMALL)
    assert ok


def test_subgroup_type_examples():
    assert subgroup_type(ZModule.cyclic(4), IntMatrix([[2]])) == ZModule.cyclic(2)
    assert subgroup_type(ZModule.free(1), IntMatrix([[2]])) == ZModule.free(1)
    two = ZModule.from_cyclic_orders(0, [2, 2])
    diag = subgroup_type(two, IntMatrix([[1], [1]]))
    assert diag == ZModule.cyclic(2)


def test_derive_submodule_spec_examples():
    trace = derive_submodule(ZModule.cyclic(4), IntMatrix([[2]]))
    assert [s.op for s in trace.steps] == ["start", "cokernel", "kernel"]
    assert trace.replay() == ZModule.cyclic(2)

    trace = derive_submodule(ZModule.free(1), IntMatrix([[2]]))
    ops = [s.op for s in trace.steps]
    assert ops[0] == "start" and ops[-1] == "kernel"
    assert any(s.op == "cokernel" and s.result == ZModule.cyclic(2)
               for s in trace.steps)
    assert trace.replay() == ZModule.free(1)

    m = ZModule.from_cyclic_orders(1, [4])
    trace = derive_submodule(m, IntMatrix.identity(2))
    assert [s.op for s in trace.steps] == ["start"]
    assert trace.replay() == m


def test_derive_submodule_random():
    rng = random.Random("derive-unit")
    for _ in range(60):
        ambient = ZModule.from_cyclic_orders(
            rng.randrange(2), [rng.choice((2, 3, 4, 9)) for _ in
                               range(rng.randrange(3))])
        g = ambient.generator_count
        if g == 0:
            continue
        cols = [[rng.randint(-2, 2) for _ in range(g)]
                for _ in range(rng.randrange(1, 3))]
        gens = IntMatrix.from_columns(cols, rows=g)
        trace = derive_submodule(ambient, gens)
        assert trace.replay() == subgroup_type(ambient, gens)
        allowed = {"start", "kernel", "cokernel", "summand", "finite_sum"}
        assert all(s.op in allowed for s in trace.steps)


def test_replay_detects_tampering():
    trace = derive_submodule(ZModule.cyclic(4), IntMatrix([[2]]))
    bad_steps = list(trace.steps)
    last = bad_steps[-1]
    bad_steps[-1] = oracle.TraceStep(last.op, last.inputs, last.matrix,
                                     ZModule.cyclic(4))
    tampered = DerivationTrace(trace.ambient, tuple(bad_steps))
    with pytest.raises(oracle.ReplayError):
        tampered.replay()


def test_torsion_cap():
    huge = ZModule.from_cyclic_orders(0, [2 ** 8, 2 ** 8])
    with pytest.raises(OracleCapError):
        subobject_types(huge)


def test_closure_result_type():
    u = Universe(primes=(2,), max_exponent=1, max_rank=0, max_torsion_factors=1)
    result = close([], {"subobjects"}, u)
    assert isinstance(result, ClosureResult)
    assert result.iterations >= 1
