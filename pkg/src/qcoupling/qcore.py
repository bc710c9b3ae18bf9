"""Foundational q-arithmetic.

q-Pochhammer symbols, basic hypergeometric series in the Gasper-Rahman
convention, and deterministic truncated summation over the natural numbers
and over all integers, with tail-error estimates.

All series evaluation runs on mpmath reals at the precision carried by the
QContext; every public value is an ``mpmath.mpf``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mpmath as mp

from .errors import DomainError, NonConvergent, PoleInLowerParameter

__all__ = [
    "QContext",
    "TruncationPolicy",
    "SeriesResult",
    "qpoch_finite",
    "qpoch_infinite",
    "rphis",
    "bilateral_sum",
    "at_working_precision",
]


def at_working_precision(fn):
    """Run fn under the working precision of its QContext argument.

    Sums and products would otherwise accumulate at whatever ambient mpmath
    precision the caller happens to have.
    """
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = None
        for a in list(args) + list(kwargs.values()):
            if isinstance(a, QContext):
                ctx = a
                break
        if ctx is None:
            return fn(*args, **kwargs)
        with ctx.workdps(10):
            return fn(*args, **kwargs)
    return wrapper


@dataclass(frozen=True)
class QContext:
    """Deformation parameter q in (0,1) plus precision/tolerance settings.

    q may be given as float, str or mpf; it is normalized to an mpf at
    construction.  working_precision is in decimal digits (>= 15).
    """

    q: object
    working_precision: int = 30
    default_tol: float = 1e-12

    def __post_init__(self):
        qv = mp.mpf(self.q)
        if not (0 < qv < 1):
            raise DomainError(f"q must lie strictly in (0,1), got {qv}")
        if self.working_precision < 15:
            raise DomainError("working_precision must be at least 15 digits")
        object.__setattr__(self, "q", qv)

    def workdps(self, extra: int = 0):
        """mpmath context manager pinning the working precision."""
        return mp.workdps(self.working_precision + extra)

    def mpf(self, x) -> mp.mpf:
        return mp.mpf(x)

    def base_squared(self) -> "QContext":
        """Context for the same computation carried out in base q^2."""
        return QContext(self.q ** 2, self.working_precision, self.default_tol)

    def qpow(self, e) -> mp.mpf:
        """q**e for integer or half-integer e."""
        return self.q ** mp.mpf(e)


@dataclass(frozen=True)
class TruncationPolicy:
    """Window and tail rules for truncated sums.

    bilateral_window fixes [lo, hi] for sums over the integers; when
    adaptive is set the window is extended until three consecutive boundary
    terms fall below tail_tol on each side (or max_terms is hit).
    """

    max_terms: int = 4000
    tail_tol: float = 1e-25
    bilateral_window: tuple[int, int] = (-30, 40)
    adaptive: bool = True
    tail_ratio: float = 0.5  # geometric extrapolation ratio for tail bounds

    def __post_init__(self):
        lo, hi = self.bilateral_window
        if lo > hi:
            raise DomainError("bilateral window needs lo <= hi")
        if self.max_terms <= 0 or self.tail_tol <= 0:
            raise DomainError("max_terms and tail_tol must be positive")


@dataclass(frozen=True)
class SeriesResult:
    """A numeric value with an estimated truncation error."""

    value: mp.mpf
    est_error: mp.mpf
    terms_used: int
    converged: bool

    def __float__(self):
        return float(self.value)


def qpoch_finite(a, ctx: QContext, n: int) -> mp.mpf:
    """(a; q)_n = prod_{k<n} (1 - a q^k); the empty product is 1."""
    if n < 0:
        raise DomainError("qpoch_finite needs n >= 0")
    a = mp.mpf(a)
    q = ctx.q
    r = mp.mpf(1)
    aqk = a
    for _ in range(n):
        r *= 1 - aqk
        aqk *= q
    return r


def qpoch_infinite(a, ctx: QContext, policy: Optional[TruncationPolicy] = None) -> SeriesResult:
    """(a; q)_infty, truncated once |a| q^k drops below the tail tolerance.

    The tail bound uses log(prod (1-aq^k)) ~ -sum aq^k, so the first-order
    relative error after stopping at k is |a| q^k / (1-q), doubled to stay
    conservative.
    """
    policy = policy or TruncationPolicy()
    a = mp.mpf(a)
    q = ctx.q
    tol = mp.mpf(policy.tail_tol)
    r = mp.mpf(1)
    aqk = a
    k = 0
    while abs(aqk) >= tol:
        r *= 1 - aqk
        aqk *= q
        k += 1
        if k > policy.max_terms:
            raise NonConvergent("qpoch_infinite exhausted max_terms")
    est = 2 * abs(r) * abs(aqk) / (1 - q)
    return SeriesResult(r, est, k, bool(est <= tol))


def _as_qpower(a, ctx: QContext, limit: int) -> Optional[int]:
    """Return n >= 0 if a == q^{-n} to working accuracy, else None."""
    a = mp.mpf(a)
    if a < 1:
        return None
    n = int(mp.nint(-mp.log(a) / mp.log(ctx.q)))
    if 0 <= n <= limit and abs(a - ctx.q ** (-n)) <= abs(a) * mp.mpf(10) ** (-ctx.working_precision + 6):
        return n
    return None


def rphis(upper: Sequence, lower: Sequence, ctx: QContext, z,
          policy: Optional[TruncationPolicy] = None) -> SeriesResult:
    """Basic hypergeometric series r_phi_s(upper; lower; q, z).

    Gasper-Rahman convention: the k-th term carries
    [(-1)^k q^{k(k-1)/2}]^{1+s-r}.  An upper parameter q^{-n} terminates the
    sum at k = n exactly (est_error 0); a lower parameter q^{-m} reached by
    the summation raises PoleInLowerParameter.
    """
    policy = policy or TruncationPolicy()
    q = ctx.q
    z = mp.mpf(z)
    upper = [mp.mpf(a) for a in upper]
    lower = [mp.mpf(b) for b in lower]
    extra_power = 1 + len(lower) - len(upper)

    nterm = None
    for a in upper:
        n = _as_qpower(a, ctx, policy.max_terms)
        if n is not None:
            nterm = n if nterm is None else min(nterm, n)
    for b in lower:
        m = _as_qpower(b, ctx, policy.max_terms)
        if m is not None and (nterm is None or m < nterm):
            raise PoleInLowerParameter(f"lower parameter q^-{m} hit by the series")

    # cancellation-aware cutoff: the discarded tail must sit below the
    # roundoff floor of the summation itself, which is set by the largest
    # term at the active precision, not by an absolute tolerance
    total = mp.mpf(0)
    term = mp.mpf(1)
    max_term = mp.mpf(1)
    k = 0
    small = 0
    while True:
        total += term
        if nterm is not None and k == nterm:
            return SeriesResult(total, mp.mpf(0), k + 1, True)
        num = mp.mpf(1)
        for a in upper:
            num *= 1 - a * q ** k
        den = 1 - q ** (k + 1)
        for b in lower:
            den *= 1 - b * q ** k
        if den == 0:
            raise PoleInLowerParameter("zero denominator during summation")
        term = term * num / den * z
        if extra_power:
            term *= (-(q ** k)) ** extra_power
        k += 1
        if abs(term) > max_term:
            max_term = abs(term)
        if nterm is None:
            thr = min(mp.mpf(policy.tail_tol),
                      max_term * mp.mpf(10) ** (-(mp.mp.dps - 5)))
            if abs(term) < thr:
                small += 1
                if small >= 3:
                    total += term
                    est = 2 * thr / (1 - q)
                    return SeriesResult(total, est, k + 1,
                                        bool(est <= mp.mpf(policy.tail_tol)))
            else:
                small = 0
            if k > policy.max_terms:
                raise NonConvergent("rphis exhausted max_terms")


def bilateral_sum(term: Callable[[int], mp.mpf],
                  policy: Optional[TruncationPolicy] = None) -> SeriesResult:
    """Deterministic sum of term(p) over an integer window.

    Summation is in ascending index order for bit-reproducibility.  In
    adaptive mode the window grows until three consecutive boundary terms
    are below tail_tol on each side.  The error estimate is the last three
    boundary magnitudes per side with a doubled geometric extrapolation.
    """
    policy = policy or TruncationPolicy()
    lo, hi = policy.bilateral_window
    tol = mp.mpf(policy.tail_tol)
    ratio = mp.mpf(policy.tail_ratio)
    # boundary threshold sized so the doubled 6-term estimate lands under tol
    bnd = tol / 30

    vals = {p: mp.mpf(term(p)) for p in range(lo, hi + 1)}

    def side_ok(ps):
        return all(abs(vals[p]) < bnd for p in ps)

    if policy.adaptive:
        guard = 0
        while not side_ok(range(lo, min(lo + 3, hi + 1))):
            lo -= 1
            vals[lo] = mp.mpf(term(lo))
            guard += 1
            if len(vals) > policy.max_terms:
                raise NonConvergent("bilateral_sum: left tail did not settle")
        while not side_ok(range(max(hi - 2, lo), hi + 1)):
            hi += 1
            vals[hi] = mp.mpf(term(hi))
            if len(vals) > policy.max_terms:
                raise NonConvergent("bilateral_sum: right tail did not settle")

    total = mp.mpf(0)
    for p in range(lo, hi + 1):
        total += vals[p]
    boundary = [abs(vals[p]) for p in range(lo, min(lo + 3, hi + 1))]
    boundary += [abs(vals[p]) for p in range(max(hi - 2, lo), hi + 1)]
    est = 2 * mp.fsum(boundary) * (1 + ratio / (1 - ratio))
    return SeriesResult(total, est, len(vals), bool(est <= tol))
