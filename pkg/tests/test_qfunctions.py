import mpmath as mp
import pytest

from qcoupling import (QContext, TruncationPolicy, WallParams, genfun_check, qbessel,
                       qbessel_lattice, qpoch_finite, qpoch_infinite, wall_genfun_check,
                       wall_orthonormal, wall_orthonormal_run, wall_poly, wall_poly_alt)
from qcoupling.errors import DomainError


def test_wall_degree_zero(ctx05):
    for x in (0, 2, 5):
        assert wall_poly(WallParams(0, x, 0.5), ctx05) == 1


def test_wall_at_origin_closed_value(ctx05):
    # p_n(1; a; q) = (-a)^n q^{n(n+1)/2} / (aq;q)_n  (the 2phi0 form collapses
    # to its k=0 term); verified here by direct finite summation of the 2phi1
    q = ctx05.q
    a = mp.mpf("0.5")
    for n in (1, 2, 4):
        brute = mp.mpf(0)
        for k in range(n + 1):
            t = qpoch_finite(q ** (-n), ctx05, k) * q ** k
            t /= qpoch_finite(a * q, ctx05, k) * qpoch_finite(q, ctx05, k)
            brute += t
        closed = (-a) ** n * q ** (mp.mpf(n) * (n + 1) / 2) / qpoch_finite(a * q, ctx05, n)
        assert abs(brute - closed) < 1e-25
        assert abs(wall_poly(WallParams(n, 0, a), ctx05) - closed) < 1e-25


def test_wall_two_term_instance(ctx05):
    # n=1, x=1: 1 + (1-q^{-1}) q^2 / ((1-aq)(1-q)) computed by hand
    q, a = ctx05.q, mp.mpf("0.5")
    expect = 1 + (1 - 1 / q) * q ** 2 / ((1 - a * q) * (1 - q))
    got = wall_poly(WallParams(1, 1, a), ctx05)
    assert abs(got - expect) < 1e-25
    assert abs(wall_poly_alt(WallParams(1, 1, a), ctx05) - expect) < 1e-20


@pytest.mark.parametrize("qs", ["0.3", "0.5", "0.7"])
def test_wall_closed_form_consistency(qs):
    ctx = QContext(qs)
    for a in (mp.mpf("0.3"), mp.mpf("0.5"), mp.mpf("1.0")):
        for n in range(0, 9, 2):
            for x in range(0, 9, 2):
                v1 = wall_poly(WallParams(n, x, a), ctx)
                v2 = wall_poly_alt(WallParams(n, x, a), ctx)
                assert abs(v1 - v2) <= 1e-12 * max(abs(v1), mp.mpf("1e-30"))


def test_wall_orthonormal_base_value(ctx05):
    got = wall_orthonormal(WallParams(0, 0, 1), ctx05)
    expect = mp.sqrt(qpoch_infinite(ctx05.q, ctx05).value)
    assert abs(got - expect) < 1e-25


def test_wall_orthonormal_domain(ctx05):
    with pytest.raises(DomainError):
        wall_orthonormal(WallParams(1, 1, 2.5), ctx05)  # a >= 1/q


def test_wall_orthonormal_dual_orthogonality(ctx05):
    # sum over degrees at fixed lattice points: delta_{xy}
    a = mp.mpf("0.5")
    runs = {x: wall_orthonormal_run(x, a, ctx05, 80) for x in (0, 1, 3)}
    for (x, y, want) in [(0, 0, 1.0), (1, 3, 0.0), (3, 3, 1.0)]:
        s = sum(u * v for u, v in zip(runs[x], runs[y]))
        assert abs(s - want) < 1e-10


def test_wall_orthonormal_primal_orthogonality(ctx05):
    # sum over lattice points at fixed degrees: delta_{nm}
    a = mp.mpf("0.5")
    for (n, m, want) in [(1, 0, 0.0), (0, 0, 1.0), (2, 2, 1.0)]:
        s = mp.fsum(wall_orthonormal(WallParams(n, x, a), ctx05)
                    * wall_orthonormal(WallParams(m, x, a), ctx05) for x in range(0, 120))
        assert abs(s - want) < 1e-10


def test_wall_orthonormal_run_matches_direct(ctx05):
    for (x, a) in [(0, mp.mpf("0.5")), (3, mp.mpf("0.25")), (6, ctx05.q ** 4)]:
        run = wall_orthonormal_run(x, a, ctx05, 14)
        for n in range(14):
            direct = wall_orthonormal(WallParams(n, x, a), ctx05)
            assert abs(run[n] - float(direct)) < 1e-12


def test_qbessel_at_zero(ctx05):
    assert qbessel(0, 0, ctx05) == 1
    for nu in (1, 2, 5):
        assert qbessel(nu, 0, ctx05) == 0


def test_qbessel_against_brute_series(ctx05):
    # independent oracle: direct 200-term summation at high precision
    q = ctx05.q
    for (nu, y) in [(0, 0), (2, 1), (1, -3), (3, 2)]:
        x = q ** y
        with mp.workdps(80):
            brute = mp.mpf(0)
            for k in range(200):
                t = (-1) ** k * mp.power(q, mp.mpf(k) * (k - 1) / 2) * (q * x) ** k
                t /= qpoch_finite(q ** (nu + 1), ctx05, k) * qpoch_finite(q, ctx05, k)
                brute += t
            brute *= x ** (mp.mpf(nu) / 2) * qpoch_infinite(q ** (nu + 1), ctx05).value \
                / qpoch_infinite(q, ctx05).value
        assert abs(qbessel_lattice(nu, y, ctx05) - brute) < 1e-24


def test_qbessel_negative_order_reflection(ctx05):
    lhs = qbessel(-2, 0.25, ctx05)
    rhs = (-1) ** 2 * ctx05.q * qbessel(2, 0.25 * ctx05.q ** 2, ctx05)
    assert abs(lhs - rhs) < 1e-25


def test_qbessel_reflection_involution(ctx05):
    # inverting the negative-order rewrite returns the original value; the
    # negative-order evaluation itself applies the rewrite once internally
    for (n, y) in [(1, 0), (3, 2), (2, -2)]:
        orig = qbessel_lattice(n, y, ctx05)
        reflected = (-1) ** n * ctx05.q ** (-mp.mpf(n) / 2) * qbessel_lattice(-n, y - n, ctx05)
        assert abs(orig - reflected) <= 1e-12 * abs(orig)


def test_qbessel_domain(ctx05):
    with pytest.raises(DomainError):
        qbessel(1, -0.5, ctx05)


@pytest.mark.parametrize("qs", ["0.3", "0.5", "0.7"])
def test_qhankel_orthogonality_spots(qs):
    from qcoupling import bilateral_sum

    ctx = QContext(qs)
    q = ctx.q
    for (nu, m, n) in [(0, 0, 0), (2, 1, -1), (-2, -3, 2), (3, 3, 3)]:
        res = bilateral_sum(lambda x: qbessel_lattice(nu, x + m, ctx)
                            * qbessel_lattice(nu, x + n, ctx) * q ** x,
                            TruncationPolicy(tail_tol=1e-16, max_terms=500))
        target = q ** (-n) if m == n else mp.mpf(0)
        assert abs(res.value - target) < 1e-10


def test_genfun_residuals(ctx05):
    assert genfun_check(1, 0.5, 0, ctx05).value < 1e-20
    assert genfun_check(1, 0.5, 0.25, ctx05).value < 1e-10
    assert genfun_check(0, 0, 0.5, ctx05).value < 1e-20
    with pytest.raises(DomainError):
        genfun_check(1, 0.5, 1.0, ctx05)


def test_wall_genfun_residuals():
    ctx05 = QContext("0.5")
    ctx03 = QContext("0.3")
    # n=0 reduces to the generating relation at t = q^{nu+1}
    assert wall_genfun_check(0, 1, 0.5, ctx05).value < 1e-10
    assert wall_genfun_check(1, 2, 0.25, ctx05).value < 1e-10
    assert wall_genfun_check(2, 0, 0.5, ctx03).value < 1e-10
