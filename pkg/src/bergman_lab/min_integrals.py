"""Extremal minimum integrals of the truncated weighted Bergman space.

The quantities computed here are constrained least-norm values

    I0        = inf { ||u||^2 : u(p) = 1 }
    I1(X)     = inf { ||u||^2 : u(p) = 0, d_X u(p) = 1 }
    I1(X|Y)   = inf { ||u||^2 : u(p) = 0, d_Y u(p) = 0, d_X u(p) = 1 }
    I1(k|<k)  = inf { ||u||^2 : u(p) = 0, d_j u(p) = 0 for j < k, d_k u(p) = 1 }
    I2(X,Y)   = inf { ||u||^2 : u(p) = 0, du(p) = 0, d_X d_Y u(p) = 1 }

over the truncated space.  Two independent solvers are provided: the
production path realises each infimum as the reciprocal squared norm of an
orthogonal projection of reproducing-kernel derivative vectors (nested
projections via modified Gram-Schmidt), while :func:`min_integral_oracle`
solves the same least-norm problems through the normal equations on the
constraint Gram matrix.  They share nothing but the basis evaluation, so
agreement between them is a meaningful check.

Derived quantities: K = 1/I0, |X|_g^2 = I0/I1(X), S = I1(X)/I1(X|Y)
(0 for parallel directions), T = I1(X) I1(Y) / (I2 I0), B = 2 - S - T and
J = I0^(n+1) / prod_k I1(k|<k).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import MultiIndex, as_direction, multiindex_enumerate
from .errors import DependentDirections, IllConditioned, ZeroVector
from .kernel_engine import (
    PARALLEL_TOL,
    BergmanModel,
    CurvatureReport,
    _adaptive,
    _cdot,
    _checked_point,
    _csum,
    _derivative_matrix,
    curvature_bisectional,
)

#: eigenvalues below lambda_max * NULL_CUTOFF are treated as exact rank loss
NULL_CUTOFF = 1e-14

#: feasibility threshold for components of the target on the null space
FEASIBILITY_TOL = 1e-8

#: condition-number ceiling for the oracle's constraint Gram matrix
CONDITION_LIMIT = 1e12


# ---------------------------------------------------------------------------
# representation vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RepresentationVectors:
    """Coefficient vectors (orthonormal-basis coordinates) representing the
    evaluation functionals at ``p``: ``<c, h> = L(u)`` for ``u = sum c_j e_j``.

    ``h0`` represents evaluation, ``h_partial[k]`` the derivative along the
    k-th coordinate, ``h_X``/``h_Y`` directional derivatives and ``h_XY``
    the mixed second derivative.  ``||h0||^2`` equals the truncated kernel
    value K(p).
    """

    point: tuple[complex, ...]
    h0: np.ndarray
    h_partial: tuple[np.ndarray, ...]
    h_X: np.ndarray | None
    h_Y: np.ndarray | None
    h_XY: np.ndarray | None
    N_used: int


def _rep_fixed(model: BergmanModel, pt: np.ndarray, X: np.ndarray | None,
               Y: np.ndarray | None, degree: int) -> RepresentationVectors:
    n = model.dimension
    jets = multiindex_enumerate(n, 2)
    col = {a: i for i, a in enumerate(jets)}
    alphas, inv_norms = model.basis_arrays(degree)
    D = _derivative_matrix(alphas, inv_norms, pt, jets)
    zero = (0,) * n
    unit = [tuple(int(i == j) for i in range(n)) for j in range(n)]

    h0 = D[:, col[zero]].conj()
    h_partial = tuple(D[:, col[unit[k]]].conj() for k in range(n))

    def directional(V: np.ndarray) -> np.ndarray:
        return sum(V[k].conjugate() * h_partial[k] for k in range(n))

    h_X = directional(X) if X is not None else None
    h_Y = directional(Y) if Y is not None else None
    h_XY = None
    if X is not None and Y is not None:
        acc = np.zeros(D.shape[0], dtype=complex)
        for k in range(n):
            for l in range(n):
                a = tuple((1 if t == k else 0) + (1 if t == l else 0)
                          for t in range(n))
                acc += (X[k] * Y[l]).conjugate() * D[:, col[a]].conj()
        h_XY = acc
    return RepresentationVectors(tuple(pt.tolist()), h0, h_partial,
                                 h_X, h_Y, h_XY, degree)


def representation_vectors(model: BergmanModel, p, X=None, Y=None, *,
                           degree: int | None = None,
                           allow_near_boundary: bool = False,
                           ) -> RepresentationVectors:
    """Representation vectors at ``p`` (at the model's truncation degree
    unless ``degree`` is given)."""
    pt = _checked_point(model, p, allow_near_boundary)
    n = model.dimension
    Xv = as_direction(X, n, "X") if X is not None else None
    Yv = as_direction(Y, n, "Y") if Y is not None else None
    d = model.config.truncation_degree if degree is None else degree
    return _rep_fixed(model.extended(d), pt, Xv, Yv, d)


# ---------------------------------------------------------------------------
# projection solver
# ---------------------------------------------------------------------------

def _norm2(v: np.ndarray) -> float:
    return math.fsum((v * v.conj()).real)


def _project_out(v: np.ndarray, frame: Sequence[np.ndarray]) -> np.ndarray:
    """Modified Gram-Schmidt removal of the (orthonormal) frame from v."""
    for q in frame:
        v = v - _cdot(v, q) * q
    return v


@dataclass(frozen=True)
class MinIntegralReport:
    """Minimum integrals at one point/direction pair plus derived scalars."""

    I0: float
    I1_X: float
    I1_Y: float
    I1_X_given_Y: float  # math.inf when X is parallel to Y
    I1_flag: tuple[float, ...]
    I2_XY: float
    S: float
    T: float
    B: float
    X_length2: float
    K: float
    J: float
    N_used: int

    def to_json_dict(self) -> dict:
        return {"I0": self.I0, "I1_X": self.I1_X, "I1_Y": self.I1_Y,
                "I1_X_given_Y": self.I1_X_given_Y,
                "I1_flag": list(self.I1_flag), "I2_XY": self.I2_XY,
                "S": self.S, "T": self.T, "B": self.B,
                "X_length2": self.X_length2, "K": self.K, "J": self.J,
                "N_used": self.N_used}


def _min_integrals_fixed(model: BergmanModel, pt: np.ndarray, X: np.ndarray,
                         Y: np.ndarray, degree: int) -> dict:
    n = model.dimension
    rv = _rep_fixed(model, pt, X, Y, degree)

    K = _norm2(rv.h0)
    I0 = 1.0 / K
    q0 = rv.h0 / math.sqrt(K)

    ht_X = _project_out(rv.h_X, [q0])
    ht_Y = _project_out(rv.h_Y, [q0])
    nX = _norm2(ht_X)
    nY = _norm2(ht_Y)
    I1_X = 1.0 / nX
    I1_Y = 1.0 / nY

    cos2 = abs(_cdot(ht_X, ht_Y)) ** 2 / (nX * nY)
    parallel = 1.0 - cos2 < PARALLEL_TOL
    if parallel:
        I1_XgY = math.inf
        S = 0.0
    else:
        resid = _project_out(ht_X, [ht_Y / math.sqrt(nY)])
        I1_XgY = 1.0 / _norm2(resid)
        S = I1_X / I1_XgY

    # nested coordinate-direction projections, k = 1..n
    flags: list[float] = []
    frame: list[np.ndarray] = []
    for k in range(n):
        ht_k = _project_out(_project_out(rv.h_partial[k], [q0]), frame)
        nk = _norm2(ht_k)
        flags.append(1.0 / nk)
        frame.append(ht_k / math.sqrt(nk))

    ht_XY = _project_out(_project_out(rv.h_XY, [q0]), frame)
    I2 = 1.0 / _norm2(ht_XY)

    T = I1_X * I1_Y / (I2 * I0)
    out = {"I0": I0, "I1_X": I1_X, "I1_Y": I1_Y, "I1_X_given_Y": I1_XgY,
           "I2_XY": I2, "S": S, "T": T, "B": 2.0 - S - T,
           "X_length2": I0 / I1_X, "K": K,
           "J": I0 ** (n + 1) / math.prod(flags)}
    for k, f in enumerate(flags):
        out[f"I1_flag_{k + 1}"] = f
    return out


def min_integrals(model: BergmanModel, p, X, Y, *, degree: int | None = None,
                  allow_near_boundary: bool = False) -> MinIntegralReport:
    """Minimum integrals along (X, Y) at ``p`` via the projection solver."""
    pt = _checked_point(model, p, allow_near_boundary)
    n = model.dimension
    Xv = as_direction(X, n, "X")
    Yv = as_direction(Y, n, "Y")

    def compute(work: BergmanModel, d: int) -> dict:
        return _min_integrals_fixed(work, pt, Xv, Yv, d)

    if degree is not None:
        rep, used = compute(model.extended(degree), degree), degree
    else:
        rep, used = _adaptive(model, compute, f"min integrals at {pt}")
    flags = tuple(rep[f"I1_flag_{k + 1}"] for k in range(n))
    return MinIntegralReport(I0=rep["I0"], I1_X=rep["I1_X"], I1_Y=rep["I1_Y"],
                             I1_X_given_Y=rep["I1_X_given_Y"], I1_flag=flags,
                             I2_XY=rep["I2_XY"], S=rep["S"], T=rep["T"],
                             B=rep["B"], X_length2=rep["X_length2"],
                             K=rep["K"], J=rep["J"], N_used=used)


# ---------------------------------------------------------------------------
# least-norm oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Constraint:
    """A linear interpolation constraint at the evaluation point.

    ``order`` 0 constrains ``u(p)``, order 1 the directional derivative
    along ``directions[0]`` and order 2 the mixed second derivative along
    ``directions[0], directions[1]``.
    """

    order: int
    directions: tuple[tuple[complex, ...], ...] = ()
    target: complex = 0j

    @staticmethod
    def value(target: complex = 1.0) -> "Constraint":
        return Constraint(0, (), complex(target))

    @staticmethod
    def derivative(X: Sequence[complex], target: complex = 0.0) -> "Constraint":
        return Constraint(1, (tuple(complex(c) for c in X),), complex(target))

    @staticmethod
    def second_derivative(X: Sequence[complex], Y: Sequence[complex],
                          target: complex = 0.0) -> "Constraint":
        return Constraint(2, (tuple(complex(c) for c in X),
                              tuple(complex(c) for c in Y)), complex(target))


def _constraint_rows(model: BergmanModel, pt: np.ndarray,
                     constraints: Sequence[Constraint], degree: int,
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Rows A with A[i, j] = L_i(e_j) and the target vector b."""
    n = model.dimension
    jets = multiindex_enumerate(n, 2)
    col = {a: i for i, a in enumerate(jets)}
    alphas, inv_norms = model.basis_arrays(degree)
    D = _derivative_matrix(alphas, inv_norms, pt, jets)
    zero = (0,) * n
    unit = [tuple(int(i == j) for i in range(n)) for j in range(n)]

    rows = []
    targets = []
    for c in constraints:
        if c.order == 0:
            row = D[:, col[zero]]
        elif c.order == 1:
            X = as_direction(c.directions[0], n, "constraint direction")
            row = sum(X[k] * D[:, col[unit[k]]] for k in range(n))
        elif c.order == 2:
            X = as_direction(c.directions[0], n, "constraint direction")
            Y = as_direction(c.directions[1], n, "constraint direction")
            row = np.zeros(D.shape[0], dtype=complex)
            for k in range(n):
                for l in range(n):
                    a = tuple((1 if t == k else 0) + (1 if t == l else 0)
                              for t in range(n))
                    row = row + X[k] * Y[l] * D[:, col[a]]
        else:
            raise ZeroVector(f"unsupported constraint order {c.order}")
        rows.append(row)
        targets.append(c.target)
    return np.array(rows), np.array(targets, dtype=complex)


def min_integral_oracle(model: BergmanModel, p,
                        constraints: Sequence[Constraint], *,
                        degree: int | None = None,
                        allow_near_boundary: bool = False) -> float:
    """Least-norm value ``min ||c||^2`` subject to the constraints, solved by
    normal equations on the constraint Gram matrix.

    Returns ``math.inf`` for infeasible constraint sets; raises
    :class:`IllConditioned` when the Gram matrix condition number exceeds
    ``1e12``.  Independent of the projection solver above.
    """
    pt = _checked_point(model, p, allow_near_boundary)
    d = model.config.truncation_degree if degree is None else degree
    A, b = _constraint_rows(model.extended(d), pt, constraints, d)

    gram = A @ A.conj().T
    gram = 0.5 * (gram + gram.conj().T)
    evals, evecs = np.linalg.eigh(gram)
    lam_max = float(evals[-1]) if evals.size else 0.0
    coords = evecs.conj().T @ b
    bscale = max(float(np.linalg.norm(b)), 1e-30)

    if lam_max <= 0.0:
        return 0.0 if np.linalg.norm(b) == 0.0 else math.inf
    null = evals <= NULL_CUTOFF * lam_max
    if np.any(np.abs(coords[null]) > FEASIBILITY_TOL * bscale):
        return math.inf
    lam_min = float(evals[~null][0])
    if lam_max / lam_min > CONDITION_LIMIT:
        raise IllConditioned(
            f"constraint Gram matrix condition number "
            f"{lam_max / lam_min:.3g} exceeds {CONDITION_LIMIT:g}")
    return float(np.sum(np.abs(coords[~null]) ** 2 / evals[~null]))


# ---------------------------------------------------------------------------
# cross-check between the tensor and minimum-integral routes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrosscheckReport:
    """Residuals between the curvature-tensor route and the minimum-integral
    route for the same point/direction pair."""

    b_residual: float
    s_residual: float
    symmetry_residual: float
    j_residual: float
    tensor: CurvatureReport
    minint: MinIntegralReport

    @property
    def max_residual(self) -> float:
        return max(self.b_residual, self.s_residual,
                   self.symmetry_residual, self.j_residual)

    def to_json_dict(self) -> dict:
        return {"b_residual": self.b_residual, "s_residual": self.s_residual,
                "symmetry_residual": self.symmetry_residual,
                "j_residual": self.j_residual,
                "max_residual": self.max_residual}


def bergman_fuks_crosscheck(model: BergmanModel, p, X, Y, *,
                            degree: int | None = None,
                            allow_near_boundary: bool = False,
                            ) -> CrosscheckReport:
    """Compare B, S and J computed from the kernel jets against the same
    quantities assembled from minimum integrals, and check the symmetry
    ``I1(X)/I1(X|Y) = I1(Y)/I1(Y|X)``.  Requires independent directions."""
    tensor = curvature_bisectional(model, p, X, Y, degree=degree,
                                   allow_near_boundary=allow_near_boundary)
    if 1.0 - tensor.cos2 < PARALLEL_TOL:
        raise DependentDirections(
            "bergman_fuks_crosscheck needs X and Y linearly independent")
    fwd = min_integrals(model, p, X, Y, degree=degree,
                        allow_near_boundary=allow_near_boundary)
    rev = min_integrals(model, p, Y, X, degree=degree,
                        allow_near_boundary=allow_near_boundary)
    sym = abs(fwd.I1_X / fwd.I1_X_given_Y - rev.I1_X / rev.I1_X_given_Y)
    return CrosscheckReport(
        b_residual=abs(tensor.B - fwd.B),
        s_residual=abs(fwd.S - (1.0 - tensor.cos2)),
        symmetry_residual=sym,
        j_residual=abs(fwd.J - tensor.J),
        tensor=tensor,
        minint=fwd,
    )
