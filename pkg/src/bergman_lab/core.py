"""Domains, weights, model configuration and multi-index arithmetic.

Everything downstream indexes monomial bases by multi-indices in graded
lexicographic order: degree first, and within one degree the index whose
leading exponents are largest comes first, e.g. for two variables
``(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...``.  Fixing this order once
makes nested-constraint quantities and report payloads reproducible.

All types here are immutable after construction and safe for concurrent
reads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, OutsideDomain, ZeroVector

MultiIndex = tuple[int, ...]

#: points are accepted while gauge(p) <= 1 - INTERIOR_MARGIN
INTERIOR_MARGIN = 1e-9


# ---------------------------------------------------------------------------
# multi-index arithmetic
# ---------------------------------------------------------------------------

def multiindex_enumerate(n: int, max_degree: int) -> list[MultiIndex]:
    """All multi-indices ``alpha`` with ``|alpha| <= max_degree``.

    The result is graded-lex ordered and has ``C(max_degree + n, n)``
    entries.
    """
    if n < 1:
        raise ConfigError(f"dimension must be >= 1, got {n}")
    if max_degree < 0:
        raise ConfigError(f"degree bound must be >= 0, got {max_degree}")

    out: list[MultiIndex] = []

    def emit(prefix: tuple[int, ...], remaining: int, slots: int) -> None:
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining, -1, -1):
            emit(prefix + (k,), remaining - k, slots - 1)

    for degree in range(max_degree + 1):
        emit((), degree, n)
    return out


def multiindex_count(n: int, max_degree: int) -> int:
    """Number of multi-indices with ``|alpha| <= max_degree``."""
    return math.comb(max_degree + n, n)


def monomial_jet(alpha: MultiIndex, p: Sequence[complex], order: int = 2,
                 ) -> dict[MultiIndex, complex]:
    """Holomorphic derivatives ``d^a z^alpha`` at ``p`` for all ``|a| <= order``.

    Exact falling-factorial rule: ``d^a z^alpha = alpha!/(alpha-a)! z^(alpha-a)``
    when ``a <= alpha`` componentwise, zero otherwise.
    """
    if order not in (0, 1, 2):
        raise ConfigError(f"jet order must be 0, 1 or 2, got {order}")
    pt = np.asarray(p, dtype=complex)
    n = len(alpha)
    if pt.shape != (n,):
        raise ConfigError(f"point has dimension {pt.shape}, expected ({n},)")
    jet: dict[MultiIndex, complex] = {}
    for a in multiindex_enumerate(n, order):
        if any(a[i] > alpha[i] for i in range(n)):
            jet[a] = 0j
            continue
        coeff = 1.0
        value = 1.0 + 0j
        for i in range(n):
            for step in range(a[i]):
                coeff *= alpha[i] - step
            value *= pt[i] ** (alpha[i] - a[i])
        jet[a] = coeff * value
    return jet


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    """A bounded complete Reinhardt domain.

    kinds:
      * ``ball``      -- ``{ |z| < r }``, ``radii == (r,)``
      * ``polydisc``  -- ``{ |z_j| < r_j }``
      * ``ellipsoid`` -- ``{ sum_j (|z_j|/a_j)^(2 p_j) < 1 }`` with
        ``radii == a`` and ``exponents == p`` (each ``p_j >= 1``)
    """

    kind: str
    dimension: int
    radii: tuple[float, ...]
    exponents: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.dimension}")
        if any(r <= 0 for r in self.radii):
            raise ConfigError(f"all radii must be positive, got {self.radii}")
        if self.kind == "ball":
            if len(self.radii) != 1:
                raise ConfigError("ball takes a single radius")
        elif self.kind == "polydisc":
            if len(self.radii) != self.dimension:
                raise ConfigError("polydisc needs one radius per variable")
        elif self.kind == "ellipsoid":
            if len(self.radii) != self.dimension:
                raise ConfigError("ellipsoid needs one radius per variable")
            if len(self.exponents) != self.dimension:
                raise ConfigError("ellipsoid needs one exponent per variable")
            if any(p < 1 for p in self.exponents):
                raise ConfigError("ellipsoid exponents must be >= 1")
        else:
            raise ConfigError(f"unknown domain kind {self.kind!r}")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def ball(n: int, radius: float = 1.0) -> "DomainSpec":
        return DomainSpec("ball", n, (float(radius),))

    @staticmethod
    def polydisc(radii: Sequence[float]) -> "DomainSpec":
        return DomainSpec("polydisc", len(radii), tuple(float(r) for r in radii))

    @staticmethod
    def ellipsoid(exponents: Sequence[float], radii: Sequence[float]) -> "DomainSpec":
        return DomainSpec("ellipsoid", len(radii),
                          tuple(float(a) for a in radii),
                          tuple(float(p) for p in exponents))

    # -- geometry ----------------------------------------------------------

    def axis_bounds(self) -> tuple[float, ...]:
        """Per-axis supremum of ``|z_j|`` over the domain."""
        if self.kind == "ball":
            return self.radii * self.dimension
        return self.radii

    def gauge(self, z: Sequence[complex]) -> float:
        """Minkowski gauge of ``z``: < 1 inside, 1 on the boundary."""
        t = np.abs(np.asarray(z, dtype=complex))
        if t.shape != (self.dimension,):
            raise ConfigError(
                f"point has shape {t.shape}, expected ({self.dimension},)")
        if self.kind == "ball":
            return float(np.linalg.norm(t) / self.radii[0])
        if self.kind == "polydisc":
            return float(np.max(t / np.asarray(self.radii)))
        c = t / np.asarray(self.radii)
        p = np.asarray(self.exponents)
        cmax = float(np.max(c))
        if cmax == 0.0:
            return 0.0
        if np.all(p == p[0]):
            return float(np.sum(c ** (2 * p[0])) ** (1.0 / (2 * p[0])))
        # mixed exponents: sum_j (c_j/lam)^(2 p_j) = 1 is monotone in lam
        lo, hi = cmax, cmax * self.dimension ** (1.0 / (2 * float(np.min(p))))
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if np.sum((c / mid) ** (2 * p)) > 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def radial_limit(self, prefix: Sequence[np.ndarray], axis: int) -> np.ndarray:
        """Upper bound for the radial variable ``t_axis`` given the values of
        ``t_0 .. t_(axis-1)`` (broadcast arrays).  Used by nested quadrature."""
        if self.kind == "polydisc":
            shape = prefix[0].shape if prefix else ()
            return np.full(shape, self.radii[axis])
        if self.kind == "ball":
            r2 = self.radii[0] ** 2
            used = sum(t * t for t in prefix) if prefix else 0.0
            return np.sqrt(np.maximum(r2 - used, 0.0))
        a = self.radii
        p = self.exponents
        used = sum((prefix[j] / a[j]) ** (2 * p[j]) for j in range(axis)) if prefix else 0.0
        room = np.maximum(1.0 - used, 0.0)
        return a[axis] * room ** (1.0 / (2 * p[axis]))


def validate_point(domain: DomainSpec, z: Sequence[complex],
                   margin: float = INTERIOR_MARGIN) -> np.ndarray:
    """Return ``z`` as a complex vector, insisting it is strictly interior."""
    pt = np.asarray(z, dtype=complex)
    if pt.shape != (domain.dimension,):
        raise ConfigError(
            f"point has shape {pt.shape}, expected ({domain.dimension},)")
    if domain.gauge(pt) > 1.0 - margin:
        raise OutsideDomain(
            f"point {pt} is not strictly interior (gauge "
            f"{domain.gauge(pt):.12g} > {1.0 - margin:.12g})")
    return pt


def as_direction(X: Sequence[complex], n: int, name: str = "X") -> np.ndarray:
    """Coerce a direction vector, rejecting zero vectors."""
    v = np.asarray(X, dtype=complex)
    if v.shape != (n,):
        raise ConfigError(f"{name} has shape {v.shape}, expected ({n},)")
    if not np.all(np.isfinite(v.view(float))):
        raise ConfigError(f"{name} has non-finite entries")
    if np.linalg.norm(v) == 0.0:
        raise ZeroVector(f"{name} must be nonzero")
    return v


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightSpec:
    """A radial weight density against Lebesgue measure.

    kinds:
      * ``unweighted``    -- density 1
      * ``ball_ke``       -- ``((n+1)/r^2)^(-(m-1)n) ((r^2-|z|^2)/r^2)^((m-1)(n+1))``
        on the ball of radius ``r`` (``level == m``); at ``m == 1`` this is
        the unweighted density
      * ``radial_power``  -- ``(1 - |z|^2/r^2)^s`` on the ball of radius ``r``
      * ``custom_radial`` -- user profile of the normalised per-axis radii
        ``|z_j| / bound_j``; must be strictly positive on the open domain
        and vectorised over a trailing axis of length ``n``
    """

    kind: str
    level: int = 1
    exponent: float = 0.0
    radius: float = 1.0
    profile: Callable[[np.ndarray], np.ndarray] | None = field(
        default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in ("unweighted", "ball_ke", "radial_power",
                             "custom_radial"):
            raise ConfigError(f"unknown weight kind {self.kind!r}")
        if self.level < 1:
            raise ConfigError(f"weight level must be >= 1, got {self.level}")
        if self.kind == "radial_power" and self.exponent < 0:
            raise ConfigError("radial_power exponent must be >= 0")
        if self.kind == "ball_ke" and self.radius <= 0:
            raise ConfigError("ball_ke radius must be positive")
        if self.kind == "custom_radial" and self.profile is None:
            raise ConfigError("custom_radial needs a profile callable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def unweighted() -> "WeightSpec":
        return WeightSpec("unweighted")

    @staticmethod
    def ball_ke(level: int, radius: float = 1.0) -> "WeightSpec":
        return WeightSpec("ball_ke", level=level, radius=float(radius))

    @staticmethod
    def radial_power(exponent: float) -> "WeightSpec":
        return WeightSpec("radial_power", exponent=float(exponent))

    @staticmethod
    def custom_radial(profile: Callable[[np.ndarray], np.ndarray],
                      level: int = 1) -> "WeightSpec":
        return WeightSpec("custom_radial", level=level, profile=profile)

    # -- evaluation --------------------------------------------------------

    def density(self, domain: DomainSpec, t: np.ndarray) -> np.ndarray:
        """Weight density at per-axis radii ``t`` (shape ``(..., n)``)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "unweighted":
            return np.ones(t.shape[:-1])
        if self.kind == "ball_ke":
            n = domain.dimension
            m = self.level
            r2 = self.radius ** 2
            pref = ((n + 1) / r2) ** (-(m - 1) * n)
            core = np.maximum((r2 - np.sum(t * t, axis=-1)) / r2, 0.0)
            return pref * core ** ((m - 1) * (n + 1))
        if self.kind == "radial_power":
            r2 = domain.radii[0] ** 2
            core = np.maximum(1.0 - np.sum(t * t, axis=-1) / r2, 0.0)
            return core ** self.exponent
        bounds = np.asarray(domain.axis_bounds())
        return np.asarray(self.profile(t / bounds), dtype=float)


# ---------------------------------------------------------------------------
# model configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelConfig:
    """Everything needed to build a truncated weighted Bergman model."""

    domain: DomainSpec
    weight: WeightSpec
    truncation_degree: int = 40
    quadrature_points: int = 32
    tolerance: float = 1e-10
    max_degree: int = 120  # escalation cap for adaptive truncation

    def __post_init__(self) -> None:
        if self.truncation_degree < 2:
            raise ConfigError("truncation degree must be >= 2 "
                              "(curvature needs bidegree-(2,2) jets)")
        if not 0.0 < self.tolerance < 1.0:
            raise ConfigError(f"tolerance must lie in (0, 1), got {self.tolerance}")
        if self.quadrature_points < 8:
            raise ConfigError("quadrature_points must be >= 8")
        if self.max_degree < self.truncation_degree:
            raise ConfigError("max_degree must be >= truncation_degree")
        w, d = self.weight, self.domain
        if w.kind in ("ball_ke", "radial_power") and d.kind != "ball":
            raise ConfigError(f"{w.kind} weight is only supported on balls")
        if w.kind == "ball_ke" and not math.isclose(w.radius, d.radii[0]):
            raise ConfigError(
                f"ball_ke weight radius {w.radius} must match the domain "
                f"radius {d.radii[0]}")

    @property
    def level(self) -> int:
        """Weight level ``m`` (1 for unweighted measures)."""
        return self.weight.level


@dataclass(frozen=True)
class PointVec:
    """An evaluation point with optional direction vectors."""

    point: tuple[complex, ...]
    X: tuple[complex, ...] | None = None
    Y: tuple[complex, ...] | None = None

    @staticmethod
    def of(point: Sequence[complex], X: Sequence[complex] | None = None,
           Y: Sequence[complex] | None = None) -> "PointVec":
        to_t = lambda v: None if v is None else tuple(complex(c) for c in v)
        return PointVec(tuple(complex(c) for c in point), to_t(X), to_t(Y))
