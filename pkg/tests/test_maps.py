import itertools
import random
from fractions import Fraction

import pytest

from helpers import random_element, random_nonzero_element
from liemap import maps
from liemap.chevalley import (CentralElementError, FieldTooSmallError,
                              build_algebra)
from liemap.fixtures import load_poly, load_witness_triples
from liemap.freelie import engel_monomial, evaluate, make_engel, parse
from liemap.scalar import make_field

Q = make_field("Q")
F3 = make_field("F3")
F5 = make_field("F5")
F7 = make_field("F7")


# -- identity testing --------------------------------------------------------


def test_identity_filippov_and_razmyslov():
    for name in ("filippov", "razmyslov"):
        v = maps.is_identity_sl2(load_poly(name), Q, mode="exact")
        assert v.result == "identity" and v.mode == "exact_symbolic"


def test_identity_degree10():
    v = maps.is_identity_sl2(load_poly("razmyslov_bracket"), Q, mode="exact")
    assert v.result == "identity"


def test_identity_engel_rejected_with_witness():
    from liemap.maps import _sl2_value
    for m in (2, 3):
        P = engel_monomial(m)
        v = maps.is_identity_sl2(P, Q)
        assert v.result == "not_identity" and v.mode == "degree_shortcut"
        assert v.witness is not None
        # the witness re-evaluates to a nonzero value, independently
        val = _sl2_value(P, v.witness, Q)
        assert not val.is_zero()
        assert (val.e, val.f, val.h) == tuple(v.witness_value)


def test_identity_randomized():
    v = maps.is_identity_sl2(load_poly("razmyslov_bracket"), Q,
                             mode="randomized", seed=3, trials=4)
    assert v.result == "probably_identity"
    assert v.failure_bound <= Fraction(1, 2 ** 40)
    v2 = maps.is_identity_sl2(engel_monomial(5), Q, mode="randomized", seed=3)
    assert v2.result == "not_identity" and v2.witness is not None


def test_identity_char2_rejected():
    with pytest.raises(maps.MapsError):
        maps.is_identity_sl2(engel_monomial(2), make_field("F2"))


def test_identity_randomized_bound_clipped_by_field():
    # over F_7 the grid is at most 7 points per coordinate, so the reported
    # failure bound must use the effective grid
    v = maps.is_identity_sl2(engel_monomial(5), F7, mode="randomized",
                             seed=0, trials=2, grid=2 ** 20)
    if v.result == "probably_identity":
        assert v.failure_bound == Fraction(6, 7) ** 2
    # degree >= field size cannot give a meaningful bound
    with pytest.raises(maps.MapsError):
        maps.is_identity_sl2(engel_monomial(9), F7, mode="randomized", seed=0)


def test_identity_cost_guard():
    big = parse("[[[[[[[[[[[[X1,X2],X2],X2],X2],X2],X2],X2],X2],X2],X2],X2],X2]")
    with pytest.raises(maps.CostGuardError):
        maps.is_identity_sl2(big, F7, mode="exact")


def test_identity_zero_polynomial():
    v = maps.is_identity_sl2(parse("[X1,X1]"), Q)
    assert v.result == "identity"


# -- dominancy witnesses -----------------------------------------------------

# exact invariant values of the bundled witness pairs, pinned as regression
# constants after the first computation
SL3_THETA = {
    "f1_1": -642379122855, "f2_1": 96001213672014543,
    "f1_2": 2467639795797, "f2_2": -1462096951353527644584,
}
SO5_THETA = {
    "f1_1": 161366358354966208584,
    "f2_1": -3199619994211598215455583395879117753648,
    "f1_2": -5728302801320544047420,
    "f2_2": 8591878815961827942555097638583616910418960,
}


def test_witness_check_sl3_fixtures():
    from liemap.matrixrep import char_invariants
    P = load_poly("razmyslov_bracket")
    _, t1, t2 = load_witness_triples("paper-a2", Q)
    v = maps.dominance_witness_check(P, t1, t2)
    assert v.result == "confirmed"
    i1, i2 = char_invariants(v.value1), char_invariants(v.value2)
    assert (i1.f1, i1.f2) == (SL3_THETA["f1_1"], SL3_THETA["f2_1"])
    assert (i2.f1, i2.f2) == (SL3_THETA["f1_2"], SL3_THETA["f2_2"])


def test_witness_check_so5_fixtures():
    from liemap.matrixrep import char_invariants
    P = load_poly("razmyslov_bracket")
    _, t1, t2 = load_witness_triples("paper-b2", Q)
    v = maps.dominance_witness_check(P, t1, t2)
    assert v.result == "confirmed"
    i1, i2 = char_invariants(v.value1), char_invariants(v.value2)
    assert (i1.f1, i1.f2) == (SO5_THETA["f1_1"], SO5_THETA["f2_1"])
    assert (i2.f1, i2.f2) == (SO5_THETA["f1_2"], SO5_THETA["f2_2"])


def test_witness_check_equal_triples():
    P = load_poly("razmyslov_bracket")
    _, t1, _ = load_witness_triples("paper-a2", Q)
    assert maps.dominance_witness_check(P, t1, t1).result == "not_separated"


def test_witness_search():
    E1, _ = make_engel([1])
    res = maps.dominance_witness_search(E1, "sl3", Q, budget=500, seed=0)
    assert res.status == "confirmed"
    check = maps.dominance_witness_check(E1, res.triple1, res.triple2)
    assert check.result == "confirmed"
    zero = parse("[X1,X1]")
    res0 = maps.dominance_witness_search(zero, "sl3", Q, budget=20, seed=0)
    assert res0.status == "exhausted"


def test_witness_search_degree10():
    # the bundled degree-10 polynomial admits witnesses in both realizations
    P = load_poly("razmyslov_bracket")
    for realization in ("sl3", "so5"):
        res = maps.dominance_witness_search(P, realization, Q, budget=200, seed=0)
        assert res.status == "confirmed"
        assert maps.dominance_witness_check(
            P, res.triple1, res.triple2).result == "confirmed"


def test_witness_search_deterministic():
    E1, _ = make_engel([1])
    r1 = maps.dominance_witness_search(E1, "sl3", Q, budget=500, seed=9)
    r2 = maps.dominance_witness_search(E1, "sl3", Q, budget=500, seed=9)
    assert r1.to_json() == r2.to_json()


# -- Engel solver ------------------------------------------------------------


def test_engel_solve_zero_target():
    alg = build_algebra("A", 2, F5)
    _, spec = make_engel([0, 1])
    sol = maps.engel_solve(alg, spec, alg.zero())
    assert sol.X.is_zero() and sol.Y.is_zero()


def test_engel_solve_sl2_example():
    alg = build_algebra("A", 1, F5)
    _, spec = make_engel([1])
    e = alg.basis_element(1)
    sol = maps.engel_solve(alg, spec, e)
    P, _ = make_engel([1])
    assert evaluate(P, [sol.X, sol.Y]) == e


def test_engel_solve_central_target_rejected():
    alg = build_algebra("A", 2, F3)
    _, spec = make_engel([0, 1])
    with pytest.raises(CentralElementError):
        maps.engel_solve(alg, spec, alg.center()[0])


def test_engel_solve_field_too_small():
    alg = build_algebra("A", 2, make_field("F2"))
    _, spec = make_engel([0, 1])
    with pytest.raises(FieldTooSmallError):
        maps.engel_solve(alg, spec, alg.h_element(0))


def test_engel_solve_excluded_combination():
    alg = build_algebra("G", 2, F3)
    _, spec = make_engel([1])
    with pytest.raises(maps.EngelSolveError):
        maps.engel_solve(alg, spec, alg.h_element(0))


def test_engel_solve_random_batch():
    rng = random.Random(77)
    alg = build_algebra("A", 2, F5)
    for m in (1, 2):
        Pm, spec = make_engel([0] * (m - 1) + [1])
        for _ in range(40):
            x = random_nonzero_element(alg, rng)
            sol = maps.engel_solve(alg, spec, x)
            assert evaluate(Pm, [sol.X, sol.Y]) == x
            assert sol.certificate and sol.trace["h"]


def test_engel_solve_generalized_on_F7():
    # |K| = 7 is below the sufficient bound m|R| = 12, yet a good h exists
    rng = random.Random(78)
    alg = build_algebra("A", 2, F7)
    P, spec = make_engel([1, 1])
    for _ in range(40):
        x = random_nonzero_element(alg, rng)
        sol = maps.engel_solve(alg, spec, x)
        assert evaluate(P, [sol.X, sol.Y]) == x


def test_engel_solve_rank3_type_A():
    # exercises the deterministic elimination on 4x4 matrices
    alg = build_algebra("A", 3, F5)
    P, spec = make_engel([0, 1])
    rng = random.Random(41)
    for _ in range(20):
        x = random_nonzero_element(alg, rng)
        if alg.is_central(x):
            continue
        sol = maps.engel_solve(alg, spec, x)
        assert evaluate(P, [sol.X, sol.Y]) == x


def test_engel_solve_avoid_set_of_size_two():
    # generalized spec whose f has two roots in F5
    alg = build_algebra("A", 1, F5)
    P, spec = make_engel([1, 1])  # f = -t + t^2, roots {0, 1}
    assert [str(r) for r in spec.roots_in(F5)] == ["0", "1"]
    rng = random.Random(42)
    for _ in range(20):
        x = random_nonzero_element(alg, rng)
        sol = maps.engel_solve(alg, spec, x)
        assert evaluate(P, [sol.X, sol.Y]) == x
        # the chosen h avoids both roots on every root of the system
        h = alg.element_from_json(sol.trace["h"])
        for b in alg.rs.roots:
            v = alg.beta_value(b.coords, h)
            assert v != F5.zero() and v != F5.one()


def test_conjugate_into_U_deterministic():
    alg = build_algebra("A", 2, F5)
    rng = random.Random(4)
    l = random_nonzero_element(alg, rng)
    g1, u1 = alg.conjugate_into_U(l)
    g2, u2 = alg.conjugate_into_U(l)
    assert u1 == u2 and g1.factors == g2.factors


def test_engel_solve_B2():
    alg = build_algebra("B", 2, F5)
    _, spec = make_engel([1])
    P, _ = make_engel([1])
    rng = random.Random(5)
    for _ in range(5):
        x = random_nonzero_element(alg, rng)
        sol = maps.engel_solve(alg, spec, x, seed=3)
        assert evaluate(P, [sol.X, sol.Y]) == x


# -- image scans --------------------------------------------------------------


def test_scan_E2_sl2_F3():
    alg = build_algebra("A", 1, F3)
    P, _ = make_engel([0, 1])
    rep = maps.image_scan(alg, P, mode="exhaustive")
    assert rep.attained_count == rep.total_elements == 27
    assert rep.contains_all_noncentral and rep.contains_zero
    assert rep.central_hits == [] and rep.missed_sample == []
    assert rep.hit_counts == {"zero": 1, "central_nonzero": 0, "noncentral": 26}


def test_scan_requires_finite_field():
    alg = build_algebra("A", 1, Q)
    P, _ = make_engel([1])
    with pytest.raises(maps.MapsError):
        maps.image_scan(alg, P, mode="exhaustive")


def test_scan_budget():
    alg = build_algebra("A", 2, F3)
    P, _ = make_engel([0, 1])
    with pytest.raises(maps.ScanBudgetError):
        maps.image_scan(alg, P, mode="exhaustive", budget=1000)


def test_scan_workers_bit_identical():
    alg = build_algebra("A", 1, F3)
    P, _ = make_engel([0, 1])
    r1 = maps.image_scan(alg, P, mode="exhaustive", workers=1)
    r2 = maps.image_scan(alg, P, mode="exhaustive", workers=2)
    j1, j2 = r1.to_json(), r2.to_json()
    j1.pop("workers"), j2.pop("workers")
    assert j1 == j2


def test_scan_sampled_workers_bit_identical():
    alg = build_algebra("A", 1, F5)
    P = maps.example48_poly()
    r1 = maps.image_scan(alg, P, mode="sampled", seed=11, sample_count=600,
                         workers=1)
    r2 = maps.image_scan(alg, P, mode="sampled", seed=11, sample_count=600,
                         workers=3)
    j1, j2 = r1.to_json(), r2.to_json()
    j1.pop("workers"), j2.pop("workers")
    assert j1 == j2


def test_scan_sampled_deterministic():
    alg = build_algebra("A", 1, F5)
    P = maps.example48_poly()
    r1 = maps.image_scan(alg, P, mode="sampled", seed=11, sample_count=500)
    r2 = maps.image_scan(alg, P, mode="sampled", seed=11, sample_count=500)
    assert r1.to_json() == r2.to_json()
    assert r1.mode == {"kind": "sampled", "count": 500, "seed": 11}
    with pytest.raises(maps.MapsError):
        maps.image_scan(alg, P, mode="sampled")


def test_engel_linear_engine_matches_brute_force():
    """The linear-fiber engine must agree exactly with the brute-force oracle
    on every small case before it is trusted on larger ones."""
    cases = [("A", 1, F3, [0, 1]), ("A", 1, F3, [1]), ("A", 1, F5, [0, 0, 1]),
             ("A", 1, F5, [1, 1]), ("A", 1, F3, [1, 2])]
    for t, r, field, coeffs in cases:
        alg = build_algebra(t, r, field)
        P, spec = make_engel(coeffs)
        brute = maps.image_scan(alg, P, mode="exhaustive")
        lin = maps.engel_image_scan(alg, spec)
        assert brute.attained_count == lin.attained_count
        assert brute.hit_counts == lin.hit_counts
        assert brute.contains_all_noncentral == lin.contains_all_noncentral
        assert [h["element"] for h in brute.central_hits] == \
            [h["element"] for h in lin.central_hits]


def test_scan_solve_cross_validation_sl2_F3():
    # |F_3| = 3 > |R+| = 1, so the size bound holds: scan and solver must
    # agree on the full noncentral set
    alg = build_algebra("A", 1, F3)
    P, spec = make_engel([0, 1])
    rep = maps.image_scan(alg, P, mode="exhaustive")
    from liemap.maps import _decode, _encode
    for idx in range(27):
        x = alg.element_from_ints(_decode(idx, 3, 3))
        if x.is_zero() or alg.is_central(x):
            continue
        sol = maps.engel_solve(alg, spec, x)
        v = evaluate(P, [sol.X, sol.Y])
        assert v == x
        assert _encode([c.val for c in v.coeffs], 3) in range(27)
    assert rep.contains_all_noncentral


def test_scan_solve_cross_validation_sl3_F3():
    # forward direction: everything the solver certifies is attained per the
    # exact linear-fiber scan (the 3^16 brute force is beyond the budget)
    alg = build_algebra("A", 2, F3)
    P, spec = make_engel([0, 1])
    lin = maps.engel_image_scan(alg, spec)
    attained_elems = None
    rng = random.Random(13)
    from liemap.maps import _int_table, _dy_matrix, _mat_mul_mod, _solve_mod
    p, dim, T = 3, alg.dim, _int_table(alg)[2]
    for _ in range(60):
        x = random_nonzero_element(alg, rng)
        if alg.is_central(x):
            continue
        sol = maps.engel_solve(alg, spec, x)
        y_ints = [c.val for c in sol.Y.coeffs]
        D = _dy_matrix(y_ints, p, dim, T)
        M = _mat_mul_mod(D, D, p)
        assert _solve_mod(M, [c.val for c in x.coeffs], p) is not None


# -- the example48 map ---------------------------------------------------------


def test_example48_scan_misses_me_mf():
    alg = build_algebra("A", 1, F5)
    P = maps.example48_poly()
    rep = maps.image_scan(alg, P, mode="exhaustive")
    from liemap.maps import _compile_int_eval, _decode, _encode
    ev = _compile_int_eval(P, alg)
    attained = set()
    for ai in range(125 ** 2):
        rest = ai
        xs = []
        for _ in range(2):
            rest, e_idx = divmod(rest, 125)
            xs.append(_decode(e_idx, 5, 3))
        attained.add(_encode(ev(xs), 5))
    assert len(attained) == rep.attained_count
    # basis order (h, e, f): m*e has index 5m, m*f has index 25m
    for m in range(1, 5):
        assert 5 * m not in attained
        assert 25 * m not in attained


def test_example48_closed_form_exhaustive():
    alg = build_algebra("A", 1, F5)
    P = maps.example48_poly()
    for a, b, c, d in itertools.product(range(5), repeat=4):
        av, bv, cv, dv = (F5.from_int(v) for v in (a, b, c, d))
        X = alg.element([F5.zero(), av, bv])
        Y = alg.element([dv, F5.zero(), cv])
        assert evaluate(P, [X, Y]) == maps.example48_closed_form(alg, av, bv, cv, dv)


def test_example48_special_values():
    alg = build_algebra("A", 1, Q)
    z = maps.example48_closed_form(alg, Q.from_int(1), Q.from_int(0),
                                   Q.from_int(0), Q.from_int(1))
    assert z.is_zero()  # s = 0
    v = maps.example48_closed_form(alg, Q.from_int(1), Q.from_int(1),
                                   Q.from_int(1), Q.from_int(1))
    # s = 3: 12h - 24e + 24f (exact evaluation fixes the e-term sign)
    assert [str(c) for c in v.coeffs] == ["12", "-24", "24"]
    z2 = maps.example48_closed_form(alg, Q.from_int(2), Q.from_int(3),
                                    Q.zero(), Q.zero())
    assert z2.is_zero()  # c = d = 0 means Y = 0


def test_example48_reduction_invariance():
    # P(X + mY, Y) = P(X, Y + mX) = P(X, Y)
    alg = build_algebra("A", 1, F7)
    P = maps.example48_poly()
    rng = random.Random(21)
    for _ in range(50):
        X, Y = random_element(alg, rng), random_element(alg, rng)
        m = F7.from_int(rng.randrange(7))
        base = evaluate(P, [X, Y])
        assert evaluate(P, [X + Y.scale(m), Y]) == base
        assert evaluate(P, [X, Y + X.scale(m)]) == base


# -- central probe -------------------------------------------------------------


def test_central_probe_trivial_center_rejected():
    alg = build_algebra("A", 1, F5)
    with pytest.raises(maps.MapsError):
        maps.central_image_probe(alg, range(1, 3))


def test_central_probe_empty_range():
    alg = build_algebra("A", 2, F3)
    rep = maps.central_image_probe(alg, [])
    assert rep.table == {} and rep.m0 is None


def test_central_probe_small():
    alg = build_algebra("A", 2, F3)
    rep = maps.central_image_probe(alg, range(1, 4))
    assert [len(rep.table[m]) for m in (1, 2, 3)] == [2, 2, 0]
    assert rep.m0 == 3
    # hits carry certified preimages (re-evaluated inside the probe)
    for hit in rep.table[1]:
        assert hit["element"]["coeffs"] != ["0"] * alg.dim


def test_central_probe_workers_match():
    alg = build_algebra("A", 2, F3)
    r1 = maps.central_image_probe(alg, range(1, 3), workers=1)
    r2 = maps.central_image_probe(alg, range(1, 3), workers=2)
    j1, j2 = r1.to_json(), r2.to_json()
    j1.pop("workers"), j2.pop("workers")
    assert j1 == j2


# -- equivariance ---------------------------------------------------------------


def test_evaluate_equivariance_under_automorphisms():
    alg = build_algebra("A", 2, F7)
    rng = random.Random(55)
    polys = [make_engel([0, 1])[0], parse("[[X1,X2],[X2,[X1,X2]]]"),
             parse("[[X1,X2],X1]")]
    for _ in range(100):
        P = polys[rng.randrange(len(polys))]
        b = alg.rs.roots[rng.randrange(len(alg.rs.roots))]
        g = alg.root_automorphism(b, F7.from_int(rng.randrange(1, 7)))
        xs = [random_element(alg, rng) for _ in range(P.arity)]
        lhs = evaluate(P, [g.apply(x) for x in xs])
        assert lhs == g.apply(evaluate(P, xs))
