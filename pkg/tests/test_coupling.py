import random

import mpmath as mp
import pytest

from qcoupling import (TruncatedFock, TruncationPolicy, bilateral_sum,
                       cg_contraction_residual, qbessel_lattice, qhankel_factorization_residual,
                       qhankel_transform, recoupling_R, sixj_closed, sixj_oracle,
                       verify_backcoupling, verify_biedenharn_elliott, verify_hexagon,
                       yang_baxter_residual, yang_baxter_unitarity_defect)
from qcoupling.coupling import backcoupling_forms_gap, hexagon_j_form_residual
from qcoupling.errors import InsufficientWindow


def test_sixj_closed_delta_structure(ctx05):
    assert sixj_closed(2, 1, -1, 0, ctx05) == 0
    got = sixj_closed(3, 0, 3, 0, ctx05)
    expect = qbessel_lattice(0, 0, ctx05.base_squared())
    assert abs(got - expect) == 0


def test_sixj_closed_vs_oracle_spots(ctx05, ctx03):
    fock = TruncatedFock(60)
    rng = random.Random(3)
    for ctx in (ctx05, ctx03):
        for _ in range(6):
            x = rng.randint(0, 2)
            p1, p2 = rng.randint(-3, 3), rng.randint(-3, 3)
            r = rng.randint(-3, 3)
            o = sixj_oracle(x, p1, r, p2, r, fock, ctx)
            c = sixj_closed(p1, r, p2, r, ctx)
            assert abs(o - float(c)) < 1e-8


def test_sixj_translation_invariance(ctx05):
    for k in range(-3, 4):
        a = sixj_closed(1 + k, 2, -1 + k, 2, ctx05)
        b = sixj_closed(1, 2, -1, 2, ctx05)
        assert a == b  # identical label differences, identical evaluation


def test_sixj_duality(ctx05):
    for (p1, p2, r) in [(2, -1, 1), (0, 3, -2), (-2, -3, 0)]:
        a = sixj_closed(p1, r, p2, r, ctx05)
        b = sixj_closed(-p2, r, -p1, r, ctx05)
        assert abs(a - b) < 1e-12


def test_sixj_orthogonality(ctx05):
    pol = TruncationPolicy(tail_tol=1e-20)
    for (p2, p3, r) in [(0, 0, 1), (1, -1, 1), (2, 2, -2)]:
        s = bilateral_sum(lambda p1: sixj_closed(p1, r, p2, r, ctx05)
                          * sixj_closed(p1, r, p3, r, ctx05), pol)
        assert abs(s.value - (1 if p2 == p3 else 0)) < 1e-8


def test_recoupling_weight_reduces_to_sixj(ctx05):
    x, n1, n2, n3 = 2, 1, 0, -1
    for (p1, p2) in [(0, 0), (2, -1), (-1, 3)]:
        r = x - n1 + n2 - n3
        tree = recoupling_R(x, n1, n2, n3, n1 + p1, n3 - p2, ctx05)
        assert abs(tree - sixj_closed(p1, r, p2, r, ctx05)) < 1e-25


def test_recoupling_weight_label_shift(ctx05):
    base = recoupling_R(1, 0, 0, 0, 0, 0, ctx05)
    for k in range(-2, 3):
        shifted = recoupling_R(1 + k, k, k, k, k, k, ctx05)
        assert abs(shifted - base) < 1e-25


def test_recoupling_weight_value(ctx05):
    got = recoupling_R(1, 0, 0, 0, 0, 0, ctx05)
    expect = qbessel_lattice(1, 0, ctx05.base_squared())
    assert abs(got - expect) == 0


def test_backcoupling_residual_is_faithful(ctx05):
    # the operation reports |LHS - RHS| with both sides computed here
    x, n1, n2, n3, p1, p2 = 1, 1, 0, -1, 1, -1
    res = verify_backcoupling(x, n1, n2, n3, p1, p2, ctx05)
    q = ctx05.q
    r123, r132, r312 = x - n1 + n2 - n3, x - n1 + n3 - n2, x - n3 + n1 - n2
    lhs = qbessel_lattice(r123, p1 + p2, ctx05)
    rhs = mp.fsum(qbessel_lattice(r132, p + p1, ctx05)
                  * qbessel_lattice(r312, p + p2, ctx05) * q ** p for p in range(-34, 44))
    assert abs(res.value - abs(lhs - rhs)) < 1e-10


def test_backcoupling_rhs_delta_specialization(ctx05):
    # with equal inner orders and matching shifts the sum is the lattice
    # orthogonality relation and evaluates to the delta value q^{-p}
    q = ctx05.q
    nu, p = 1, 1
    rhs = bilateral_sum(lambda s: qbessel_lattice(nu, s + p, ctx05)
                        * qbessel_lattice(nu, s + p, ctx05) * q ** s)
    assert abs(rhs.value - q ** (-p)) < 1e-10


def test_backcoupling_identity_fails_as_stated(ctx05):
    # the stated identity does not close; see the repository notes
    res = verify_backcoupling(1, 1, 0, -1, 1, -1, ctx05)
    assert res.value > 1e-2


def test_backcoupling_forms_translate_identically(ctx05):
    # weight form and q-Bessel form are the same statement: their residuals
    # agree through the sign-power translation factor even though both are large
    gap = backcoupling_forms_gap(1, 1, 0, -1, 2, 0, ctx05)
    assert gap < 1e-10


@pytest.mark.parametrize("labels", [(0, 0, 0, 0, 0, 0), (1, 0, -1, 1, 0, 1), (2, 1, 0, -1, 1, 0)])
def test_biedenharn_elliott(ctx05, labels):
    res = verify_biedenharn_elliott(*labels, ctx05)
    assert res.value < 1e-10


def test_biedenharn_elliott_random_sweep(ctx05):
    rng = random.Random(17)
    worst = 0.0
    for _ in range(12):
        labels = [rng.randint(-2, 2) for _ in range(6)]
        res = verify_biedenharn_elliott(*labels, ctx05)
        worst = max(worst, float(res.value))
    assert worst < 1e-8


def test_hexagon_symmetric_fixed_point(ctx05):
    # swap-invariant labels make both sides coincide termwise
    res = verify_hexagon(1, 1, 0, 0, 1, 0, 0, 1, 1, ctx05)
    assert res.value < 1e-10
    res0 = verify_hexagon(0, 0, 0, 0, 0, 0, 0, 0, 0, ctx05)
    assert res0.value < 1e-10


def test_hexagon_identity_fails_as_stated(ctx05):
    res = verify_hexagon(1, 1, 0, 0, -1, 0, 1, 0, 1, ctx05)
    assert res.value > 1e-2


def test_hexagon_j_form_reconstruction(ctx05):
    # the printed q-Bessel form reproduces the weight form on each side
    gap_l, gap_r = hexagon_j_form_residual(1, 1, 0, 0, -1, 0, 1, 0, 1, ctx05)
    assert gap_l < 1e-8 and gap_r < 1e-8


def test_yang_baxter_unitarity(ctx05):
    for (u, v) in [(0, 0), (1, 0), (-1, 1)]:
        assert yang_baxter_unitarity_defect(u, v, (-10, 10), ctx05) < 1e-6


def test_yang_baxter_triple_fails_as_stated(ctx05):
    probe = [(0, 0, 0), (1, -1, 0), (0, 1, -1)]
    d = yang_baxter_residual(1, 0, -1, (-10, 10), ctx05, probe=probe)
    assert d > 1e-2


def test_yang_baxter_window_guard(ctx05):
    with pytest.raises(InsufficientWindow):
        yang_baxter_residual(0, 0, 0, (-3, 3), ctx05)
    with pytest.raises(InsufficientWindow):
        yang_baxter_residual(0, 0, 0, (-10, 10), ctx05, probe=[(0, 0, 40)])


def test_qhankel_transform_delta_property(ctx05):
    q = ctx05.q
    nu, m = 1, 2
    f = {x: qbessel_lattice(nu, x + m, ctx05) for x in range(-30, 40)}
    out = qhankel_transform(f, nu, ctx05, out_window=(-4, 4))
    for n, val in out.items():
        want = q ** (-n) if n == m else mp.mpf(0)
        assert abs(val - want) < 1e-9


def test_qhankel_transform_zero(ctx05):
    out = qhankel_transform({0: mp.mpf(0), 1: mp.mpf(0)}, 2, ctx05, out_window=(-2, 2))
    assert all(v == 0 for v in out.values())


def test_qhankel_factorization_fails_as_stated(ctx05):
    q = ctx05.q
    f = {x: q ** (mp.mpf(x * x) / 2) for x in range(-20, 25)}
    resid = qhankel_factorization_residual(1, 0, 1, -1, f, ctx05)
    assert resid > 1e-2


def test_cg_contraction(ctx05):
    for (x, n, m, k, p1) in [(2, 1, 0, 1, 0), (3, 0, 1, 2, 1), (2, 2, 1, 0, -1)]:
        assert cg_contraction_residual(x, n, m, k, p1, ctx05) < 1e-8


def test_cg_contraction_cutoff_convention(ctx05):
    # terms beyond the structural cutoff vanish through the zero convention
    from qcoupling import cg_coefficient

    x, n, m, k = 2, 1, 0, 1
    for p2 in range(k + 1, k + 6):
        assert cg_coefficient(x, k - p2, k, ctx05) == 0.0
