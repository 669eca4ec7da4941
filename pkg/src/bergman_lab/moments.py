"""Squared weighted L2 norms of monomials (moments) on Reinhardt domains.

For a radial weight on a complete Reinhardt domain the monomials are
orthogonal, so the moment table ``alpha -> ||z^alpha||^2`` determines the
whole truncated Bergman model.  Closed forms are used where available
(ball with unweighted / Kaehler-Einstein / radial-power weights, polydisc
unweighted); everything else reduces, by polar symmetry in each variable,
to an n-dimensional radial integral evaluated with adaptive nested
Gauss-Legendre quadrature.

Closed forms are evaluated through log-gamma so that large levels and
degrees cannot overflow intermediate factorials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import DomainSpec, ModelConfig, MultiIndex, WeightSpec, multiindex_enumerate
from .errors import MomentUnderflow, NonConvergent

#: moments smaller than this are treated as underflow, not as values
UNDERFLOW_FLOOR = 1e-300

#: hard cap on Gauss-Legendre nodes per axis during adaptive refinement
MAX_NODES_PER_AXIS = 2 ** 14

#: cap on the total tensor-grid size held in memory at once
_CHUNK_LIMIT = 2 ** 22


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _log_ball_power_moment(alpha: MultiIndex, n: int, s: float) -> float:
    """log of ``int_{|z|<1} |z^alpha|^2 (1-|z|^2)^s dV`` (Forelli-Rudin)."""
    a = sum(alpha)
    return (n * math.log(math.pi)
            + sum(math.lgamma(k + 1) for k in alpha)
            + math.lgamma(s + 1.0)
            - math.lgamma(n + a + s + 1.0))


def moment_closed_form(alpha: MultiIndex, domain: DomainSpec,
                       weight: WeightSpec) -> float | None:
    """Closed-form moment, or ``None`` when the pair has no closed form."""
    n = domain.dimension
    if domain.kind == "ball":
        r = domain.radii[0]
        a = sum(alpha)
        if weight.kind == "unweighted":
            log_v = _log_ball_power_moment(alpha, n, 0.0) \
                + (2 * a + 2 * n) * math.log(r)
        elif weight.kind == "radial_power":
            log_v = _log_ball_power_moment(alpha, n, weight.exponent) \
                + (2 * a + 2 * n) * math.log(r)
        elif weight.kind == "ball_ke":
            m = weight.level
            s = (m - 1) * (n + 1)
            log_pref = -(m - 1) * n * math.log((n + 1) / r ** 2)
            log_v = log_pref + _log_ball_power_moment(alpha, n, float(s)) \
                + (2 * a + 2 * n) * math.log(r)
        else:
            return None
        return _checked_exp(log_v, alpha)
    if domain.kind == "polydisc" and weight.kind == "unweighted":
        log_v = sum(math.log(math.pi) + (2 * k + 2) * math.log(rj)
                    - math.log(k + 1)
                    for k, rj in zip(alpha, domain.radii))
        return _checked_exp(log_v, alpha)
    return None


def _checked_exp(log_v: float, alpha: MultiIndex) -> float:
    if log_v < math.log(UNDERFLOW_FLOOR):
        raise MomentUnderflow(
            f"moment for alpha={alpha} underflows (log value {log_v:.3g})")
    return math.exp(log_v)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def _nested_gauss_legendre(f, domain: DomainSpec, nodes: int) -> float:
    """Integrate ``f(t)`` over the radial profile ``{t_j >= 0} ∩ domain``.

    ``f`` takes an array of shape ``(..., n)`` and returns ``(...)``.  The
    region is swept as an iterated integral with variable upper limits, the
    outermost axis chunked to bound memory.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    n = domain.dimension

    def sweep(prefix: list[np.ndarray], axis: int) -> np.ndarray:
        b = domain.radial_limit(prefix, axis)
        t = np.multiply.outer(b, x)
        grown = [np.broadcast_to(q[..., None], t.shape) for q in prefix]
        if axis == n - 1:
            vals = f(np.stack(grown + [t], axis=-1))
        else:
            vals = sweep(grown + [t], axis + 1)
        return np.einsum('...k,k->...', vals, w) * b

    if n == 1 or nodes ** n <= _CHUNK_LIMIT:
        return float(sweep([], 0))
    # chunk the outermost axis
    b0 = float(domain.radial_limit([], 0))
    t0 = b0 * x
    chunk = max(1, _CHUNK_LIMIT // nodes ** (n - 1))
    total = 0.0
    for lo in range(0, nodes, chunk):
        sl = slice(lo, min(lo + chunk, nodes))
        inner = sweep([t0[sl]], 1)
        total += float(np.dot(inner, w[sl]))
    return total * b0


def moment_quadrature(alpha: MultiIndex, domain: DomainSpec,
                      weight: WeightSpec, quadrature_points: int = 32,
                      tolerance: float = 1e-10) -> float:
    """Moment by adaptive nested Gauss-Legendre on the radial integral.

    Reduces the 2n-real-dimensional integral to an n-dimensional one via
    polar symmetry, then doubles the node count per axis until two
    successive estimates agree to ``tolerance`` relative.  Raises
    :class:`NonConvergent` when the per-axis cap is reached first.
    """
    n = domain.dimension
    a = np.asarray(alpha, dtype=float)

    def integrand(t: np.ndarray) -> np.ndarray:
        mono = np.prod(t ** (2 * a + 1), axis=-1)
        return mono * weight.density(domain, t)

    scale = (2.0 * math.pi) ** n
    nodes = max(8, quadrature_points)
    prev = scale * _nested_gauss_legendre(integrand, domain, nodes)
    while nodes < MAX_NODES_PER_AXIS:
        nodes *= 2
        cur = scale * _nested_gauss_legendre(integrand, domain, nodes)
        if abs(cur - prev) <= tolerance * max(abs(cur), UNDERFLOW_FLOOR):
            if cur < UNDERFLOW_FLOOR:
                raise MomentUnderflow(
                    f"moment for alpha={alpha} underflows ({cur:.3g})")
            return cur
        prev = cur
    raise NonConvergent(
        f"moment quadrature for alpha={alpha} did not stabilise to "
        f"{tolerance:g} within {MAX_NODES_PER_AXIS} nodes per axis")


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentTable:
    """Moment values for all ``|alpha| <= degree``, with per-entry provenance."""

    config: ModelConfig
    degree: int
    values: dict[MultiIndex, float]
    provenance: dict[MultiIndex, str]

    def value(self, alpha: MultiIndex) -> float:
        return self.values[alpha]

    def indices(self, degree: int | None = None) -> list[MultiIndex]:
        """Basis indices up to ``degree`` in graded-lex order."""
        d = self.degree if degree is None else degree
        if d > self.degree:
            raise KeyError(f"table only covers degree {self.degree}, asked {d}")
        return multiindex_enumerate(self.config.domain.dimension, d)

    def to_records(self) -> list[dict]:
        return [{"alpha": list(alpha), "value": self.values[alpha],
                 "provenance": self.provenance[alpha]}
                for alpha in self.indices()]


def _compute_moment(alpha: MultiIndex, config: ModelConfig) -> tuple[float, str]:
    closed = moment_closed_form(alpha, config.domain, config.weight)
    if closed is not None:
        return closed, "closed_form"
    value = moment_quadrature(alpha, config.domain, config.weight,
                              config.quadrature_points, config.tolerance)
    return value, "quadrature"


def build_moment_table(config: ModelConfig, degree: int | None = None) -> MomentTable:
    """Moment table for all ``|alpha| <= degree`` (default: the configured
    truncation degree).  Entries are independent, so the loop could be
    farmed out per alpha; at desk scale the serial build is cheap."""
    d = config.truncation_degree if degree is None else degree
    values: dict[MultiIndex, float] = {}
    provenance: dict[MultiIndex, str] = {}
    for alpha in multiindex_enumerate(config.domain.dimension, d):
        values[alpha], provenance[alpha] = _compute_moment(alpha, config)
    return MomentTable(config, d, values, provenance)


def extend_moment_table(table: MomentTable, degree: int) -> MomentTable:
    """A table covering ``degree``, reusing every already computed entry."""
    if degree <= table.degree:
        return table
    values = dict(table.values)
    provenance = dict(table.provenance)
    for alpha in multiindex_enumerate(table.config.domain.dimension, degree):
        if alpha not in values:
            values[alpha], provenance[alpha] = _compute_moment(alpha, table.config)
    return MomentTable(table.config, degree, values, provenance)
