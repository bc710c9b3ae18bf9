"""Truncated matrix model of the deformed SU(2) function algebra.

Generator matrices on a truncated Fock space, tensor-product actions through
the coproduct, the coupled eigenvectors of the positivized diagonal generator,
the associated Clebsch-Gordan coefficients, and the inner-product oracle for
recoupling (6j) coefficients.

Generator matrices are float64 numpy arrays; coupled vectors are sparse dicts
keyed by basis multi-indices.  Coefficient accuracy is ~1e-12, far inside the
1e-8 oracle tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .errors import DomainError, InsufficientTruncation
from .qcore import QContext
from .qfunctions import wall_orthonormal_run

__all__ = [
    "TruncatedFock",
    "GenOperator",
    "CoupledVector",
    "pi0_matrix",
    "check_defining_relations",
    "cg_coefficient",
    "CGTable",
    "coupled_vector",
    "sixj_oracle",
    "coproduct_terms",
    "threefold_terms",
    "apply_threefold",
    "apply_threefold_ggstar",
]


@dataclass(frozen=True)
class TruncatedFock:
    """Basis e_0 .. e_{dim-1} of the truncated representation space."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("TruncatedFock needs dim >= 2")


@dataclass(frozen=True)
class GenOperator:
    tag: str
    matrix: np.ndarray


# coproduct of each generator as a list of (left, right) factor tags
_COPRODUCT = {
    "alpha": [("alpha", "alpha"), ("beta", "gamma")],
    "beta": [("alpha", "beta"), ("beta", "delta")],
    "gamma": [("gamma", "alpha"), ("delta", "gamma")],
    "delta": [("delta", "delta"), ("gamma", "beta")],
}


def pi0_matrix(tag: str, fock: TruncatedFock, ctx: QContext) -> GenOperator:
    """Matrix of a generator in the standard representation (phase label 0).

    alpha lowers with weight sqrt(1-q^{2n}), delta raises with
    sqrt(1-q^{2n+2}) (dropped at the cut), beta and gamma are diagonal with
    entries -q^{n+1} and q^n.
    """
    N = fock.dim
    q = float(ctx.q)
    m = np.zeros((N, N))
    if tag == "alpha":
        for n in range(1, N):
            m[n - 1, n] = math.sqrt(1 - q ** (2 * n))
    elif tag == "delta":
        for n in range(N - 1):
            m[n + 1, n] = math.sqrt(1 - q ** (2 * n + 2))
    elif tag == "beta":
        for n in range(N):
            m[n, n] = -q ** (n + 1)
    elif tag == "gamma":
        for n in range(N):
            m[n, n] = q ** n
    else:
        raise DomainError(f"unknown generator tag {tag!r}")
    return GenOperator(tag, m)


def check_defining_relations(fock: TruncatedFock, ctx: QContext) -> float:
    """Max interior residual of the six algebra relations as matrices.

    Interior means rows/columns 0..dim-2: the boundary row of the raising
    relation is a truncation artifact, not algebra content.
    """
    if fock.dim < 4:
        raise DomainError("relation check needs dim >= 4")
    q = float(ctx.q)
    g = {t: pi0_matrix(t, fock, ctx).matrix for t in ("alpha", "beta", "gamma", "delta")}
    al, be, ga, de = g["alpha"], g["beta"], g["gamma"], g["delta"]
    I = np.eye(fock.dim)
    rels = [
        al @ be - q * be @ al,
        al @ ga - q * ga @ al,
        be @ de - q * de @ be,
        ga @ de - q * de @ ga,
        be @ ga - ga @ be,
        al @ de - q * be @ ga - I,
        de @ al - be @ ga / q - I,
    ]
    cut = fock.dim - 1
    return max(float(np.abs(r[:cut, :cut]).max()) for r in rels)


class CGTable:
    """Cached Clebsch-Gordan coefficients for one (q, nmax).

    C(x, m, n) is an orthonormal Wall value in base q^2 with degree
    min(m, n), parameter q^{2|n-m|} and argument q^{2x}; it vanishes for any
    negative index.  Columns are recurrence runs shared across lookups.
    """

    def __init__(self, ctx: QContext, nmax: int = 70):
        self.ctx2 = ctx.base_squared()
        self.nmax = nmax
        self._cols: Dict[Tuple[int, int], list] = {}

    def column(self, x: int, s: int) -> list:
        key = (x, s)
        col = self._cols.get(key)
        if col is None:
            col = wall_orthonormal_run(x, self.ctx2.q ** s, self.ctx2, self.nmax)
            self._cols[key] = col
        return col

    def C(self, x: int, m: int, n: int) -> float:
        if x < 0 or m < 0 or n < 0:
            return 0.0
        deg = min(m, n)
        if deg >= self.nmax:
            return 0.0
        return self.column(x, abs(n - m))[deg]


_CG_TABLES: Dict[Tuple[str, int], CGTable] = {}


def _cg_table(ctx: QContext, nmax: int = 70) -> CGTable:
    key = (str(ctx.q), nmax)
    tbl = _CG_TABLES.get(key)
    if tbl is None:
        tbl = CGTable(ctx, nmax)
        _CG_TABLES[key] = tbl
    return tbl


def cg_coefficient(x: int, m: int, n: int, ctx: QContext) -> float:
    """Clebsch-Gordan coefficient C_{x,m,n}; zero on any negative index.

    Symmetric in (m, n).  The branch with degree min(m, n) is the one under
    which the coupled-pair family is orthonormal in both index groups.
    """
    return _cg_table(ctx).C(x, m, n)


@dataclass(frozen=True)
class CoupledVector:
    """Sparse eigenvector of the coupled positivized diagonal generator."""

    scheme: str
    x: int
    p: int
    r: int  # unused for two-fold schemes
    coeffs: dict = field(repr=False)

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.coeffs.values()))

    def inner(self, other: "CoupledVector") -> float:
        a, b = self.coeffs, other.coeffs
        if len(a) > len(b):
            a, b = b, a
        return sum(c * b[k] for k, c in a.items() if k in b)


def coupled_vector(scheme: str, x: int, p: int, r: int,
                   fock: TruncatedFock, ctx: QContext) -> CoupledVector:
    """Eigenvector of the coupled gamma*gamma-adjoint operator, eigenvalue q^{2x}.

    Schemes: "12" and "21" on two factors (r ignored), "1(23)" and "(12)3"
    on three.  Conventions: any negative basis index contributes nothing.
    """
    if x < 0:
        raise DomainError("coupled_vector needs x >= 0")
    N = fock.dim
    cg = _cg_table(ctx, max(70, N + 10))
    v: dict = {}
    if scheme in ("12", "21"):
        pp = p if scheme == "12" else -p
        for m in range(N):
            n = m + pp
            if 0 <= n < N:
                c = cg.C(x, m, n)
                if c != 0.0:
                    v[(m, n)] = c
    elif scheme == "1(23)":
        for n in range(N):
            c1 = cg.C(x, n, n + p)
            if c1 == 0.0:
                continue
            inner_p = x - n - r
            for m in range(N):
                k = m + inner_p
                if 0 <= k < N:
                    c2 = cg.C(n + p, m, k)
                    if c2 != 0.0:
                        v[(n, m, k)] = c1 * c2
    elif scheme == "(12)3":
        for k in range(N):
            c1 = cg.C(x, k - p, k)
            if c1 == 0.0:
                continue
            inner_p = r - x + k
            for n in range(N):
                m = n + inner_p
                if 0 <= m < N:
                    c2 = cg.C(k - p, n, m)
                    if c2 != 0.0:
                        v[(n, m, k)] = c1 * c2
    else:
        raise DomainError(f"unknown scheme {scheme!r}")
    return CoupledVector(scheme, x, p, r, v)


def coproduct_terms(tag: str):
    """Coproduct of a generator as (left-tag, right-tag) summands."""
    return list(_COPRODUCT[tag])


def threefold_terms(tag: str):
    """(1 x coproduct)(coproduct) of a generator as triples of tags."""
    out = []
    for left, right in _COPRODUCT[tag]:
        for midl, midr in _COPRODUCT[right]:
            out.append((left, midl, midr))
    return out


def _single_action(tag: str, idx: int, q: float, N: int):
    """Image of e_idx under one generator: (new_index, coefficient) or None."""
    if tag == "alpha":
        if idx == 0:
            return None
        return idx - 1, math.sqrt(1 - q ** (2 * idx))
    if tag == "delta":
        if idx + 1 >= N:
            return None
        return idx + 1, math.sqrt(1 - q ** (2 * idx + 2))
    if tag == "beta":
        return idx, -q ** (idx + 1)
    if tag == "gamma":
        return idx, q ** idx
    raise DomainError(f"unknown generator tag {tag!r}")


def apply_threefold(tag: str, vec: CoupledVector, fock: TruncatedFock,
                    ctx: QContext) -> dict:
    """Apply the three-fold coupled action of a generator to a sparse vector.

    Each summand of the iterated coproduct is a triple of shift/diagonal
    matrices, so one basis vector maps to at most one basis vector per term.
    """
    q = float(ctx.q)
    N = fock.dim
    out: dict = {}
    for tags in threefold_terms(tag):
        for idx, val in vec.coeffs.items():
            coef = val
            new = []
            dead = False
            for t, i in zip(tags, idx):
                hit = _single_action(t, i, q, N)
                if hit is None:
                    dead = True
                    break
                j, c = hit
                new.append(j)
                coef *= c
            if not dead:
                key = tuple(new)
                out[key] = out.get(key, 0.0) + coef
    return out


def apply_threefold_ggstar(vec: CoupledVector, fock: TruncatedFock, ctx: QContext) -> dict:
    """Apply the coupled gamma*gamma-adjoint operator on three factors.

    Expansion of the positivized diagonal element through the coproduct:
    -q^{-1} (gb x ad + ga x ab + db x gd + da x gb), with the right legs
    expanded once more.
    """
    q = float(ctx.q)
    N = fock.dim
    pairs = [("gamma", "beta", "alpha", "delta"),
             ("gamma", "alpha", "alpha", "beta"),
             ("delta", "beta", "gamma", "delta"),
             ("delta", "alpha", "gamma", "beta")]
    out: dict = {}
    for g1, g2, h1, h2 in pairs:
        # (g1 g2) on leg 1, coproduct of (h1 h2) on legs 2,3
        for l1, r1 in _COPRODUCT[h1]:
            for l2, r2 in _COPRODUCT[h2]:
                for idx, val in vec.coeffs.items():
                    coef = -val / q
                    i = idx[0]
                    dead = False
                    for t in (g2, g1):
                        hit = _single_action(t, i, q, N)
                        if hit is None:
                            dead = True
                            break
                        i, c = hit
                        coef *= c
                    if dead:
                        continue
                    j = idx[1]
                    for t in (l2, l1):
                        hit = _single_action(t, j, q, N)
                        if hit is None:
                            dead = True
                            break
                        j, c = hit
                        coef *= c
                    if dead:
                        continue
                    k = idx[2]
                    for t in (r2, r1):
                        hit = _single_action(t, k, q, N)
                        if hit is None:
                            dead = True
                            break
                        k, c = hit
                        coef *= c
                    if dead:
                        continue
                    key = (i, j, k)
                    out[key] = out.get(key, 0.0) + coef
    return out


def sixj_oracle(x: int, p1: int, r1: int, p2: int, r2: int,
                fock: TruncatedFock, ctx: QContext,
                norm_floor: float = 1 - 1e-8) -> float:
    """Recoupling coefficient as a truncated inner product of coupled vectors.

    This is the representation-side oracle against which the closed form is
    validated; it never touches the q-Bessel series path.
    """
    if x < 0:
        raise DomainError("sixj_oracle needs x >= 0")
    u = coupled_vector("1(23)", x, p1, r1, fock, ctx)
    v = coupled_vector("(12)3", x, p2, r2, fock, ctx)
    nu_, nv = u.norm(), v.norm()
    if nu_ < norm_floor or nv < norm_floor:
        raise InsufficientTruncation(
            f"coupled-vector norms {nu_:.2e}, {nv:.2e} below {norm_floor}; increase dim")
    return u.inner(v)
