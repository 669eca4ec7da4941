"""Truncated weighted Bergman kernel: jets, metric, curvature, canonical
functions.

The diagonal kernel is the finite sum ``K(z) = sum_a |z^a|^2 / ||z^a||^2``
over the moment table, and every mixed derivative up to bidegree (2,2) is
obtained by differentiating the monomials exactly; no finite differences
enter anywhere.  Series are accumulated with exactly rounded (compensated)
summation, with the basis in graded order so the dominant low-degree terms
are never swamped.

Every reported quantity is stabilised in the truncation degree: it is
computed at degrees ``d`` and ``d + 10`` and accepted only when no reported
scalar moves by more than the configured relative tolerance, escalating up
to the configured cap (also capped by the ``BERGMAN_LAB_MAX_N`` environment
variable).
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ModelConfig,
    MultiIndex,
    as_direction,
    multiindex_enumerate,
    validate_point,
)
from .errors import (
    NotPositiveDefinite,
    RegionGuard,
    TruncationInsufficient,
    ZeroVector,
)
from .moments import MomentTable, build_moment_table, extend_moment_table

#: series evaluation refuses points with gauge beyond this fraction unless
#: explicitly overridden (geometric tail decay degrades near the boundary)
GUARD_FRACTION = 0.95

#: degree increment between successive truncation levels
DEGREE_STEP = 10

#: vectors are declared parallel when 1 - cos^2 drops below this
PARALLEL_TOL = 1e-12

ENV_MAX_DEGREE = "BERGMAN_LAB_MAX_N"


def _env_degree_cap() -> int | None:
    raw = os.environ.get(ENV_MAX_DEGREE)
    return int(raw) if raw else None


def _csum(v: np.ndarray) -> complex:
    """Exactly rounded sum of a complex vector (math.fsum per component)."""
    return complex(math.fsum(v.real), math.fsum(v.imag))


def _cdot(u: np.ndarray, v: np.ndarray) -> complex:
    """Hermitian inner product ``<u, v> = sum u_i conj(v_i)``, compensated."""
    return _csum(u * v.conj())


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BergmanModel:
    """An immutable truncated weighted Bergman space (moment table + config)."""

    config: ModelConfig
    table: MomentTable

    @property
    def dimension(self) -> int:
        return self.config.domain.dimension

    @property
    def basis_size(self) -> int:
        return len(self.table.indices(self.config.truncation_degree))

    def extended(self, degree: int) -> "BergmanModel":
        """A model whose table covers ``degree`` (self if it already does)."""
        if degree <= self.table.degree:
            return self
        return BergmanModel(self.config, extend_moment_table(self.table, degree))

    def basis_arrays(self, degree: int) -> tuple[np.ndarray, np.ndarray]:
        """(exponent rows, 1/sqrt(moment)) for the basis up to ``degree``."""
        idx = self.table.indices(degree)
        alphas = np.asarray(idx, dtype=np.int64).reshape(len(idx), self.dimension)
        inv = np.asarray([1.0 / math.sqrt(self.table.values[a]) for a in idx])
        return alphas, inv


def build_model(config: ModelConfig) -> BergmanModel:
    """Build the moment table for ``config`` and wrap it as a model."""
    return BergmanModel(config, build_moment_table(config))


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

def _derivative_matrix(alphas: np.ndarray, inv_norms: np.ndarray,
                       p: np.ndarray, jet_indices: list[MultiIndex]) -> np.ndarray:
    """D[row, col] = (d^a e_row)(p) for the normalised monomial basis."""
    nbasis, n = alphas.shape
    maxdeg = int(alphas.max()) if nbasis else 0
    pows = np.empty((n, maxdeg + 1), dtype=complex)
    pows[:, 0] = 1.0
    for k in range(1, maxdeg + 1):
        pows[:, k] = pows[:, k - 1] * p
    D = np.zeros((nbasis, len(jet_indices)), dtype=complex)
    for col, a in enumerate(jet_indices):
        arr = np.asarray(a, dtype=np.int64)
        ok = np.all(alphas >= arr, axis=1)
        if not ok.any():
            continue
        rows = alphas[ok]
        coeff = np.ones(rows.shape[0])
        value = np.ones(rows.shape[0], dtype=complex)
        for i in range(n):
            ki = rows[:, i]
            if arr[i] == 1:
                coeff = coeff * ki
            elif arr[i] == 2:
                coeff = coeff * ki * (ki - 1)
            value = value * pows[i, ki - arr[i]]
        D[ok, col] = coeff * value * inv_norms[ok]
    return D


@dataclass(frozen=True)
class KernelJet:
    """All mixed diagonal derivatives ``d^a dbar^b K`` with ``|a|,|b| <= 2``."""

    point: tuple[complex, ...]
    derivs: dict[tuple[MultiIndex, MultiIndex], complex]
    N_used: int

    @property
    def dimension(self) -> int:
        return len(self.point)

    @property
    def value(self) -> float:
        """K(p), the (0,0) entry."""
        zero = (0,) * self.dimension
        return self.derivs[(zero, zero)].real

    def entry(self, a: MultiIndex, b: MultiIndex) -> complex:
        return self.derivs[(tuple(a), tuple(b))]


def _jet_fixed(model: BergmanModel, p: np.ndarray, degree: int) -> KernelJet:
    n = model.dimension
    jets = multiindex_enumerate(n, 2)
    alphas, inv_norms = model.basis_arrays(degree)
    D = _derivative_matrix(alphas, inv_norms, p, jets)
    derivs: dict[tuple[MultiIndex, MultiIndex], complex] = {}
    for ia, a in enumerate(jets):
        # diagonal entries are sums of squared moduli: keep them exactly real
        col = D[:, ia]
        derivs[(a, a)] = complex(
            math.fsum(col.real * col.real) + math.fsum(col.imag * col.imag), 0.0)
        for ib in range(ia + 1, len(jets)):
            v = _cdot(col, D[:, ib])
            derivs[(a, jets[ib])] = v
            derivs[(jets[ib], a)] = v.conjugate()
    return KernelJet(tuple(p.tolist()), derivs, degree)


def _checked_point(model: BergmanModel, p, allow_near_boundary: bool) -> np.ndarray:
    pt = validate_point(model.config.domain, p)
    g = model.config.domain.gauge(pt)
    if not allow_near_boundary and g > GUARD_FRACTION:
        raise RegionGuard(
            f"gauge(p) = {g:.4f} > {GUARD_FRACTION}; series truncation is "
            "unreliable this close to the boundary "
            "(pass allow_near_boundary=True to override)")
    return pt


# ---------------------------------------------------------------------------
# adaptive truncation
# ---------------------------------------------------------------------------

def _close_scalar(a, b, tol: float, floor: float) -> bool:
    if isinstance(a, float) and isinstance(b, float):
        if math.isinf(a) or math.isinf(b):
            return a == b
    return abs(b - a) <= tol * max(abs(a), abs(b), floor)


def _reports_close(prev: dict, cur: dict, tol: float) -> bool:
    finite = [abs(v) for v in cur.values()
              if not (isinstance(v, float) and math.isinf(v))]
    scale = max(finite) if finite else 1.0
    floor = 1e-3 * scale
    return all(_close_scalar(prev[k], cur[k], tol, floor) for k in cur)


def _adaptive(model: BergmanModel, compute, context: str):
    """Escalate the truncation degree until ``compute``'s scalars stabilise.

    ``compute(model, degree) -> dict``; returns ``(report, N_used)`` where
    the report is the one at the higher of the two agreeing degrees.
    """
    cfg = model.config
    cap = cfg.max_degree
    env = _env_degree_cap()
    if env is not None:
        cap = min(cap, env)
    hi = min(cfg.truncation_degree + DEGREE_STEP, cap)
    lo = max(2, hi - DEGREE_STEP)
    work = model.extended(hi)
    prev = compute(work, lo)
    while True:
        cur = compute(work, hi)
        if _reports_close(prev, cur, cfg.tolerance):
            return cur, hi
        lo, hi = hi, hi + DEGREE_STEP
        if hi > cap:
            raise TruncationInsufficient(
                f"{context}: not stable to {cfg.tolerance:g} at degree cap {cap}")
        prev = cur
        work = work.extended(hi)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def kernel_jet(model: BergmanModel, p, *, degree: int | None = None,
               allow_near_boundary: bool = False) -> KernelJet:
    """Diagonal kernel jet at ``p``.

    With ``degree`` the jet of that fixed truncation is returned; otherwise
    the degree escalates until every jet entry is stable.
    """
    pt = _checked_point(model, p, allow_near_boundary)
    if degree is not None:
        return _jet_fixed(model.extended(degree), pt, degree)

    def compute(work: BergmanModel, d: int) -> dict:
        return dict(_jet_fixed(work, pt, d).derivs)

    derivs, used = _adaptive(model, compute, f"kernel_jet at {pt}")
    return KernelJet(tuple(pt.tolist()), derivs, used)


@dataclass(frozen=True)
class MetricData:
    """Metric matrix ``g_(j kbar)``, its inverse and determinant at a point."""

    point: tuple[complex, ...]
    G: np.ndarray
    G_inverse: np.ndarray
    det_G: float
    N_used: int


def _metric_from_jet(jet: KernelJet) -> MetricData:
    n = jet.dimension
    zero = (0,) * n
    unit = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    K = jet.value
    if K <= 0.0:
        raise NotPositiveDefinite(f"kernel value {K:.6g} is not positive")
    Kj = np.array([jet.derivs[(unit[j], zero)] for j in range(n)])
    G = np.empty((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            G[j, k] = (K * jet.derivs[(unit[j], unit[k])]
                       - Kj[j] * Kj[k].conjugate()) / (K * K)
    G = 0.5 * (G + G.conj().T)
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(
            "metric matrix is not positive-definite; raise the truncation "
            "degree or move away from the boundary") from exc
    det = float(np.prod(np.abs(np.diag(L))) ** 2)
    G_inv = np.linalg.inv(G)
    return MetricData(jet.point, G, G_inv, det, jet.N_used)


def metric(model: BergmanModel, p, *, degree: int | None = None,
           allow_near_boundary: bool = False) -> MetricData:
    """Weighted Bergman metric matrix at ``p`` (positive-definite or error)."""
    pt = _checked_point(model, p, allow_near_boundary)
    if degree is not None:
        return _metric_from_jet(_jet_fixed(model.extended(degree), pt, degree))

    def compute(work: BergmanModel, d: int) -> dict:
        md = _metric_from_jet(_jet_fixed(work, pt, d))
        out = {f"g{j}{k}": md.G[j, k] for j in range(md.G.shape[0])
               for k in range(md.G.shape[1])}
        out["det"] = md.det_G
        return out

    _, used = _adaptive(model, compute, f"metric at {pt}")
    return _metric_from_jet(_jet_fixed(model.extended(used), pt, used))


def _g_inner(G: np.ndarray, u: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.einsum("jk,j,k->", G, u, v.conj()))


def inner_product(metric_data: MetricData, X, Y) -> complex:
    """Sesquilinear product ``<X, Y>_g = sum g_(j kbar) X_j conj(Y_k)``."""
    n = metric_data.G.shape[0]
    Xv = as_direction(X, n, "X")
    Yv = as_direction(Y, n, "Y")
    return _g_inner(metric_data.G, Xv, Yv)


def length2(metric_data: MetricData, X) -> float:
    """Squared metric length ``|X|_g^2`` (> 0 for X != 0)."""
    return inner_product(metric_data, X, X).real


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def _second_directional(jet: KernelJet, X: np.ndarray, Y: np.ndarray,
                        b: MultiIndex) -> complex:
    """``sum_(i,k) X_i Y_k  d^(e_i + e_k) dbar^b K`` at the jet's point."""
    n = jet.dimension
    total = 0j
    for i in range(n):
        for k in range(n):
            a = tuple((1 if t == i else 0) + (1 if t == k else 0)
                      for t in range(n))
            total += X[i] * Y[k] * jet.derivs[(a, b)]
    return total


def _bisectional_from_jet(jet: KernelJet, md: MetricData,
                          X: np.ndarray, Y: np.ndarray) -> complex:
    """Bisectional curvature along (X, Y) from the jet, complex-valued so
    callers can monitor the imaginary residue."""
    n = jet.dimension
    zero = (0,) * n
    unit = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    K = jet.value

    nXX = _g_inner(md.G, X, X).real
    nYY = _g_inner(md.G, Y, Y).real
    ipXY = _g_inner(md.G, X, Y)

    KXY = _second_directional(jet, X, Y, zero)
    K4 = 0j
    for j in range(n):
        for l in range(n):
            b = tuple((1 if t == j else 0) + (1 if t == l else 0)
                      for t in range(n))
            K4 += _second_directional(jet, X, Y, b) * (X[j] * Y[l]).conjugate()
    Kr = np.array([jet.derivs[(unit[r], zero)] for r in range(n)])
    V = np.array([K * _second_directional(jet, X, Y, unit[r])
                  - KXY * Kr[r].conjugate() for r in range(n)])
    form = complex(np.einsum("rs,r,s->", md.G_inverse, V, V.conj()))

    numerator = (nXX * nYY + abs(ipXY) ** 2
                 - (K * K4 - abs(KXY) ** 2) / K ** 2
                 + form / K ** 4)
    return numerator / (nXX * nYY)


def _orthonormal_frame(md: MetricData, X: np.ndarray,
                       candidate_order: tuple[int, ...] | None = None,
                       ) -> list[np.ndarray]:
    """Gram-Schmidt frame under g whose first leg is X/|X|_g."""
    n = md.G.shape[0]
    order = candidate_order if candidate_order is not None else tuple(range(n))
    candidates = [X] + [np.eye(n, dtype=complex)[i] for i in order]
    frame: list[np.ndarray] = []
    for c in candidates:
        v = c.astype(complex)
        for u in frame:
            v = v - _g_inner(md.G, v, u) * u
        l2 = _g_inner(md.G, v, v).real
        if l2 > 1e-20 * _g_inner(md.G, c, c).real:
            frame.append(v / math.sqrt(l2))
        if len(frame) == n:
            break
    return frame


@dataclass(frozen=True)
class CurvatureReport:
    """Curvature scalars at one point/direction pair.

    ``B`` is the bisectional curvature along (X, Y), ``H`` the holomorphic
    sectional curvature along X (i.e. B with Y := X), ``cos2`` the squared
    metric angle, ``S = 1 - cos2`` (0 for parallel directions), and
    ``T = 2 - S - B``.
    """

    B: float
    H: float
    S: float
    T: float
    ricci: float
    J: float
    J_tilde: float
    cos2: float
    N_used: int

    def to_json_dict(self) -> dict:
        return {"B": self.B, "H": self.H, "S": self.S, "T": self.T,
                "ricci": self.ricci, "J": self.J, "J_tilde": self.J_tilde,
                "cos2": self.cos2, "N_used": self.N_used}


def _curvature_scalars(work: BergmanModel, d: int, pt: np.ndarray,
                       X: np.ndarray, Y: np.ndarray,
                       frame_order: tuple[int, ...] | None = None) -> dict:
    jet = _jet_fixed(work, pt, d)
    md = _metric_from_jet(jet)
    B = _bisectional_from_jet(jet, md, X, Y).real
    H = _bisectional_from_jet(jet, md, X, X).real
    nXX = _g_inner(md.G, X, X).real
    nYY = _g_inner(md.G, Y, Y).real
    cos2 = abs(_g_inner(md.G, X, Y)) ** 2 / (nXX * nYY)
    S = 0.0 if 1.0 - cos2 < PARALLEL_TOL else 1.0 - cos2
    ric = math.fsum(_bisectional_from_jet(jet, md, X, u).real
                    for u in _orthonormal_frame(md, X, frame_order))
    m = work.config.level
    K = jet.value
    J = md.det_G / K
    J_tilde = md.det_G / (m ** md.G.shape[0] * K ** (1.0 / m))
    return {"B": B, "H": H, "S": S, "T": 2.0 - S - B, "cos2": cos2,
            "ricci": ric, "J": J, "J_tilde": J_tilde}


def curvature_bisectional(model: BergmanModel, p, X, Y, *,
                          degree: int | None = None,
                          allow_near_boundary: bool = False,
                          frame_order: tuple[int, ...] | None = None,
                          ) -> CurvatureReport:
    """Full curvature report along the pair (X, Y) at ``p``."""
    pt = _checked_point(model, p, allow_near_boundary)
    n = model.dimension
    Xv = as_direction(X, n, "X")
    Yv = as_direction(Y, n, "Y")

    def compute(work: BergmanModel, d: int) -> dict:
        return _curvature_scalars(work, d, pt, Xv, Yv, frame_order)

    if degree is not None:
        rep, used = compute(model.extended(degree), degree), degree
    else:
        rep, used = _adaptive(model, compute, f"curvature at {pt}")
    return CurvatureReport(B=rep["B"], H=rep["H"], S=rep["S"], T=rep["T"],
                           ricci=rep["ricci"], J=rep["J"],
                           J_tilde=rep["J_tilde"], cos2=rep["cos2"],
                           N_used=used)


def ricci(model: BergmanModel, p, X, *, degree: int | None = None,
          allow_near_boundary: bool = False,
          frame_order: tuple[int, ...] | None = None) -> float:
    """Ricci curvature along X: sum of B(X, e_i) over a g-orthonormal frame
    containing X/|X|_g.  Scale-invariant in X and independent of the frame
    completion order."""
    report = curvature_bisectional(model, p, X, X, degree=degree,
                                   allow_near_boundary=allow_near_boundary,
                                   frame_order=frame_order)
    return report.ricci


def canonical_functions(model: BergmanModel, p, *, degree: int | None = None,
                        allow_near_boundary: bool = False) -> tuple[float, float]:
    """Canonical function ``J = det G / K`` and its level-m normalisation
    ``J~ = det(G/m) / K^(1/m)``."""
    pt = _checked_point(model, p, allow_near_boundary)
    m = model.config.level
    n = model.dimension

    def compute(work: BergmanModel, d: int) -> dict:
        jet = _jet_fixed(work, pt, d)
        md = _metric_from_jet(jet)
        K = jet.value
        return {"J": md.det_G / K,
                "J_tilde": md.det_G / (m ** n * K ** (1.0 / m))}

    if degree is not None:
        rep = compute(model.extended(degree), degree)
    else:
        rep, _ = _adaptive(model, compute, f"canonical functions at {pt}")
    return rep["J"], rep["J_tilde"]
