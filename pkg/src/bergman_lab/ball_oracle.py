"""Closed-form ground truth for the ball, ball automorphisms, Caratheodory
length at the origin, and the quantitative squeezing bounds.

For the ball of radius r with the level-m Kaehler-Einstein weight the
kernel, metric, canonical functions, origin curvature tensors and origin
minimum integrals all have explicit closed forms built around the
normalising constant

    C(m, n) = pi^n / (n+1)^((m-1)n) * ((m-1)(n+1))! / (m(n+1)-1)!

Everything here is exact formula evaluation (log-gamma throughout, so
large m(n+1) cannot overflow) and therefore serves as an independent
reference for the series engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import as_direction
from .errors import ConfigError, OutsideDomain, ZeroVector
from .kernel_engine import PARALLEL_TOL
from .min_integrals import MinIntegralReport


def ball_constant(m: int, n: int) -> float:
    """Normalising constant of the ball's closed-form weighted kernel."""
    if m < 1 or n < 1:
        raise ConfigError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    log_c = (n * math.log(math.pi)
             - (m - 1) * n * math.log(n + 1)
             + math.lgamma((m - 1) * (n + 1) + 1)
             - math.lgamma(m * (n + 1)))
    return math.exp(log_c)


def _cos2(X: np.ndarray, Y: np.ndarray) -> float:
    return abs(np.vdot(Y, X)) ** 2 / (
        np.vdot(X, X).real * np.vdot(Y, Y).real)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallReference:
    """Closed-form values on the ball; tensor fields are origin-only and
    ``None`` unless directions were supplied with z = 0."""

    r: float
    m: int
    n: int
    z: tuple[complex, ...]
    K: float
    G: np.ndarray
    det_G: float
    J: float
    J_tilde: float
    B: float | None = None
    H: float | None = None
    S: float | None = None
    T: float | None = None
    cos2: float | None = None


def ball_closed_forms(r: float, m: int, n: int, z: Sequence[complex] | None = None,
                      X: Sequence[complex] | None = None,
                      Y: Sequence[complex] | None = None) -> BallReference:
    """Exact kernel/metric/canonical values at ``z`` (default the origin),
    with the origin curvature tensors when X and Y are given."""
    C = ball_constant(m, n)
    zv = np.zeros(n, dtype=complex) if z is None else np.asarray(z, dtype=complex)
    if zv.shape != (n,):
        raise ConfigError(f"z has shape {zv.shape}, expected ({n},)")
    t = np.vdot(zv, zv).real
    if t >= r * r:
        raise OutsideDomain(f"|z|^2 = {t:.6g} is not inside the ball of radius {r}")

    w = r * r - t
    K = (1.0 / C) * r ** (2 * m) / w ** (m * (n + 1))
    G = m * (n + 1) * (np.eye(n, dtype=complex) / w
                       + np.outer(zv.conj(), zv) / w ** 2)
    det_G = (m * (n + 1)) ** n * r * r / w ** (n + 1)
    J = C * (m * (n + 1)) ** n * w ** ((m - 1) * (n + 1)) / r ** (2 * (m - 1))
    J_tilde = C ** (1.0 / m) * (n + 1) ** n

    B = H = S = T = cos2 = None
    if X is not None and Y is not None:
        if t != 0.0:
            raise ConfigError("curvature tensors are closed-form at z = 0 only")
        Xv = as_direction(X, n, "X")
        Yv = as_direction(Y, n, "Y")
        cos2 = _cos2(Xv, Yv)
        mn1 = m * (n + 1)
        B = -(1.0 + cos2) / mn1
        H = -2.0 / mn1
        S = 0.0 if 1.0 - cos2 < PARALLEL_TOL else 1.0 - cos2
        T = (1.0 + 1.0 / mn1) * (1.0 + cos2)
    return BallReference(r=r, m=m, n=n, z=tuple(zv.tolist()), K=K, G=G,
                         det_G=det_G, J=J, J_tilde=J_tilde, B=B, H=H, S=S,
                         T=T, cos2=cos2)


def ball_min_integrals_origin(r: float, m: int, n: int, X: Sequence[complex],
                              Y: Sequence[complex]) -> MinIntegralReport:
    """Closed-form minimum integrals of the weighted ball at the origin.

    ``N_used`` is reported as 0: these are exact values, not truncations.
    """
    Xv = as_direction(X, n, "X")
    Yv = as_direction(Y, n, "Y")
    C = ball_constant(m, n)
    mn1 = m * (n + 1)
    x2 = np.vdot(Xv, Xv).real
    y2 = np.vdot(Yv, Yv).real
    cos2 = _cos2(Xv, Yv)

    I0 = C * r ** (2 * m * n)
    base1 = C * r ** (2 * (m * n + 1)) / mn1
    I1_X = base1 / x2
    I1_Y = base1 / y2
    parallel = 1.0 - cos2 < PARALLEL_TOL
    I1_XgY = math.inf if parallel else I1_X / (1.0 - cos2)
    flags = (base1,) * n
    I2 = (C * r ** (2 * (m * n + 2)) / (mn1 * (mn1 + 1))
          / (x2 * y2 * (1.0 + cos2)))

    S = 0.0 if parallel else I1_X / I1_XgY
    T = I1_X * I1_Y / (I2 * I0)
    return MinIntegralReport(I0=I0, I1_X=I1_X, I1_Y=I1_Y, I1_X_given_Y=I1_XgY,
                             I1_flag=flags, I2_XY=I2, S=S, T=T, B=2.0 - S - T,
                             X_length2=I0 / I1_X, K=1.0 / I0,
                             J=I0 ** (n + 1) / math.prod(flags), N_used=0)


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallAutomorphism:
    """The involutive Moebius automorphism of the radius-r ball swapping the
    origin and ``a`` (the identity for a = 0)."""

    a: tuple[complex, ...]
    radius: float = 1.0

    def __post_init__(self) -> None:
        av = np.asarray(self.a, dtype=complex)
        if np.linalg.norm(av) >= self.radius:
            raise OutsideDomain(
                f"automorphism center must lie inside the ball of radius "
                f"{self.radius}")

    @property
    def dimension(self) -> int:
        return len(self.a)

    def _core(self) -> tuple[np.ndarray, float, np.ndarray | None]:
        """Unit-ball data: rescaled center, sqrt(1-|a|^2), mixing matrix."""
        av = np.asarray(self.a, dtype=complex) / self.radius
        na2 = np.vdot(av, av).real
        if na2 == 0.0:
            return av, 1.0, None
        s = math.sqrt(1.0 - na2)
        n = len(av)
        A = s * np.eye(n, dtype=complex) + (1.0 - s) * np.outer(av, av.conj()) / na2
        return av, s, A

    def __call__(self, z: Sequence[complex]) -> np.ndarray:
        zv = np.asarray(z, dtype=complex) / self.radius
        av, _, A = self._core()
        if A is None:
            return zv * self.radius
        d = 1.0 - np.vdot(av, zv)
        return self.radius * (av - A @ zv) / d

    def jacobian(self, z: Sequence[complex]) -> np.ndarray:
        """Complex Jacobian matrix dF at z (exact, not differenced)."""
        zv = np.asarray(z, dtype=complex) / self.radius
        av, _, A = self._core()
        n = len(av)
        if A is None:
            return np.eye(n, dtype=complex)
        d = 1.0 - np.vdot(av, zv)
        return -A / d + np.outer(av - A @ zv, av.conj()) / d ** 2

    def jacobian_det(self, z: Sequence[complex]) -> complex:
        return complex(np.linalg.det(self.jacobian(z)))


def ball_automorphism(a: Sequence[complex], radius: float = 1.0) -> BallAutomorphism:
    """Automorphism of the radius-``radius`` ball with ``F(a) = 0``,
    ``F(0) = a`` and ``F(F(z)) = z``."""
    return BallAutomorphism(tuple(complex(c) for c in a), float(radius))


# ---------------------------------------------------------------------------
# Caratheodory length at the ball origin
# ---------------------------------------------------------------------------

def caratheodory_origin(r: float, X: Sequence[complex]) -> float:
    """Caratheodory length of X at the origin of the radius-r ball: |X|/r.

    Attained by the linear functional ``z -> <z, X>/(r |X|)`` into the unit
    disc; the Schwarz-Pick lemma shows nothing does better.
    """
    Xv = np.asarray(X, dtype=complex)
    norm = float(np.linalg.norm(Xv))
    if norm == 0.0:
        raise ZeroVector("Caratheodory length needs a nonzero direction")
    return norm / r


# ---------------------------------------------------------------------------
# squeezing bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SqueezingBound:
    """A lower bound for the squeezing number at a point.

    ``inclusion`` provenance means only the conservative bound r/R derived
    from a sandwich ``B_r  ⊂ Ω ⊂ B_R`` (after rescaling to the unit ball)
    is known; intervals computed from it contain the true, narrower ones.
    """

    s_lower: float
    provenance: str

    def __post_init__(self) -> None:
        if not 0.0 < self.s_lower <= 1.0:
            raise ConfigError(f"squeezing bound must lie in (0, 1], "
                              f"got {self.s_lower}")

    @staticmethod
    def exact_ball() -> "SqueezingBound":
        return SqueezingBound(1.0, "exact_ball")

    @staticmethod
    def from_inclusion(r: float, R: float) -> "SqueezingBound":
        if not 0.0 < r <= R:
            raise ConfigError(f"inclusion needs 0 < r <= R, got r={r}, R={R}")
        return SqueezingBound(r / R, f"inclusion({r:g},{R:g})")

    @staticmethod
    def user(s: float) -> "SqueezingBound":
        return SqueezingBound(float(s), "user")


@dataclass(frozen=True)
class BoundsReport:
    """A curvature interval from a squeezing bound, with the measured value
    (when supplied) and its containment flag."""

    s: float
    m: int
    n: int
    variant: str
    D_m: float
    lower: float
    upper: float
    value: float | None
    contained: bool | None

    def to_json_dict(self) -> dict:
        return {"s": self.s, "m": self.m, "n": self.n, "variant": self.variant,
                "D_m": self.D_m, "lower": self.lower, "upper": self.upper,
                "value": self.value, "contained": self.contained}


def _containment_eps(value: float) -> float:
    # mixed absolute/relative floor: the interval is exactly [0, 0] at s = 1
    return 1e-9 + 1e-6 * abs(value)


def squeezing_bounds(s: SqueezingBound | float, m: int, n: int,
                     cos2: float | None = None,
                     measured_B: float | None = None,
                     variant: str = "bisectional") -> BoundsReport:
    """Quantitative two-sided curvature bounds at squeezing number ``s``.

    For the bisectional variant the bracketed quantity is
    ``B + (1/(m(n+1))) (1 + cos2)``; for the holomorphic variant it is
    ``H + 2/(m(n+1))`` (pass the measured H as ``measured_B``).  At s = 1
    both bounds collapse to exactly zero.
    """
    sb = s if isinstance(s, SqueezingBound) else SqueezingBound.user(float(s))
    sval = sb.s_lower
    mn1 = m * (n + 1)
    D = (mn1 + 1) / mn1
    q = m * n + 1
    if variant == "bisectional":
        lower = D * (1.0 - sval ** (-2 * q)) * (2.0 + sval ** (-2 * q))
    elif variant == "holomorphic":
        lower = 2.0 * D * (1.0 - sval ** (-4 * q))
    else:
        raise ConfigError(f"unknown bounds variant {variant!r}")
    upper = 2.0 * D * (1.0 - sval ** (4 * q))

    value = contained = None
    if measured_B is not None:
        if variant == "bisectional":
            if cos2 is None:
                raise ConfigError("bisectional containment needs cos2")
            value = measured_B + (1.0 + cos2) / mn1
        else:
            value = measured_B + 2.0 / mn1
        eps = _containment_eps(value)
        contained = bool(lower - eps <= value <= upper + eps)
    return BoundsReport(s=sval, m=m, n=n, variant=variant, D_m=D,
                        lower=lower, upper=upper, value=value,
                        contained=contained)


# ---------------------------------------------------------------------------
# inclusion sandwiches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContainmentRow:
    lower: float
    upper: float
    value: float
    contained: bool
    slack: float

    def to_json_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "value": self.value,
                "contained": self.contained, "slack": self.slack}


@dataclass(frozen=True)
class SandwichReport:
    """Per-quantity containment for a domain squeezed between two balls."""

    r: float
    R: float
    m: int
    n: int
    rows: dict[str, ContainmentRow]

    @property
    def all_contained(self) -> bool:
        return all(row.contained for row in self.rows.values())

    def to_json_dict(self) -> dict:
        return {"r": self.r, "R": self.R, "m": self.m, "n": self.n,
                "all_contained": self.all_contained,
                "rows": {k: v.to_json_dict() for k, v in self.rows.items()}}


def _row(lower: float, upper: float, value: float) -> ContainmentRow:
    eps = _containment_eps(value)
    slack = min(value - lower, upper - value)
    return ContainmentRow(lower, upper, value, bool(slack >= -eps), slack)


def inclusion_sandwich(r: float, R: float, m: int, n: int,
                       X: Sequence[complex], Y: Sequence[complex],
                       measured: dict) -> SandwichReport:
    """Two-sided bounds at the origin for a domain with ``B_r ⊂ Ω ⊂ B_R``
    (weights squeezed between the two ball weights of level m).

    ``measured`` carries the origin measurements to be checked, keyed
    ``X_length2``, ``S``, ``T``, ``J``, ``J_tilde``; any subset may be
    supplied.  With r = R every sandwich collapses to an equality.
    """
    if not 0.0 < r <= R:
        raise ConfigError(f"need 0 < r <= R, got r={r}, R={R}")
    Xv = as_direction(X, n, "X")
    Yv = as_direction(Y, n, "Y")
    C = ball_constant(m, n)
    mn1 = m * (n + 1)
    x2 = np.vdot(Xv, Xv).real
    cos2 = _cos2(Xv, Yv)
    rho = r / R

    rows: dict[str, ContainmentRow] = {}
    if "X_length2" in measured:
        rows["X_length2"] = _row(rho ** (2 * m * n) * mn1 * x2 / R ** 2,
                                 rho ** (-2 * m * n) * mn1 * x2 / r ** 2,
                                 measured["X_length2"])
    if "S" in measured:
        s_ball = 1.0 - cos2
        rows["S"] = _row(rho ** (2 * (m * n + 1)) * s_ball,
                         rho ** (-2 * (m * n + 1)) * s_ball,
                         measured["S"])
    if "T" in measured:
        t_ball = (1.0 + 1.0 / mn1) * (1.0 + cos2)
        rows["T"] = _row(rho ** (4 * (m * n + 1)) * t_ball,
                         rho ** (-4 * (m * n + 1)) * t_ball,
                         measured["T"])
    base_j = C * mn1 ** n
    if "J" in measured:
        rows["J"] = _row(base_j * r ** (2 * m * n * (n + 1)) / R ** (2 * n * (m * n + 1)),
                         base_j * R ** (2 * m * n * (n + 1)) / r ** (2 * n * (m * n + 1)),
                         measured["J"])
    if "J_tilde" in measured:
        base_jt = C ** (1.0 / m) * (n + 1) ** n
        e = 2 * n * (m * n + 1)  # 2mn(n + 1/m) == 2n(mn+1)
        rows["J_tilde"] = _row(base_jt * r ** e / R ** e,
                               base_jt * R ** e / r ** e,
                               measured["J_tilde"])
    return SandwichReport(r=r, R=R, m=m, n=n, rows=rows)
