"""Verification suites: each one checks a family of identities or bounds on
seeded samples and reports per-case residuals.

A suite returns a :class:`SuiteResult` whose ``passed`` flag is the
conjunction of its per-case checks at the suite's tolerances.  The CLI
``verify`` command turns ``passed`` into the process exit code; the
acceptance tests call the same functions directly.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .ball_oracle import (
    SqueezingBound,
    ball_automorphism,
    ball_closed_forms,
    ball_constant,
    ball_min_integrals_origin,
    caratheodory_origin,
    inclusion_sandwich,
    squeezing_bounds,
)
from .core import DomainSpec, ModelConfig, WeightSpec
from .errors import ConfigError
from .kernel_engine import (
    BergmanModel,
    build_model,
    curvature_bisectional,
    kernel_jet,
    length2,
    metric,
    ricci,
)
from .min_integrals import (
    Constraint,
    bergman_fuks_crosscheck,
    min_integral_oracle,
    min_integrals,
)
from .moments import build_moment_table


@dataclass(frozen=True)
class SuiteCase:
    index: int
    params: dict
    residuals: dict[str, float]
    passed: bool

    def to_json_dict(self) -> dict:
        return {"index": self.index, "params": self.params,
                "residuals": self.residuals, "pass": self.passed}


@dataclass
class SuiteResult:
    suite: str
    seed: int | None
    tolerances: dict[str, float]
    cases: list[SuiteCase] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        finite = [r for c in self.cases for r in c.residuals.values()
                  if not math.isinf(r)]
        return max(finite) if finite else 0.0

    @property
    def passed(self) -> bool:
        ok = all(c.passed for c in self.cases)
        return ok and self.info.get("extra_checks_pass", True)

    def to_json_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed,
                "tolerances": self.tolerances,
                "cases": [c.to_json_dict() for c in self.cases],
                "max_residual": self.max_residual, "pass": self.passed,
                "info": self.info}


def _ball_model(n: int, m: int, r: float = 1.0, degree: int = 40,
                cap: int = 120, prebuild: int | None = None) -> BergmanModel:
    weight = WeightSpec.ball_ke(m, r) if m > 1 else WeightSpec.unweighted()
    cfg = ModelConfig(DomainSpec.ball(n, r), weight, truncation_degree=degree,
                      max_degree=cap)
    table = build_moment_table(cfg, prebuild if prebuild is not None else None)
    return BergmanModel(cfg, table)


def _polydisc_model(radii, degree: int = 40, cap: int = 120,
                    prebuild: int | None = None) -> BergmanModel:
    cfg = ModelConfig(DomainSpec.polydisc(radii), WeightSpec.unweighted(),
                      truncation_degree=degree, max_degree=cap)
    table = build_moment_table(cfg, prebuild)
    return BergmanModel(cfg, table)


def _ellipsoid_model(exponents=(1.0, 1.0), radii=(1.0, 0.8),
                     degree: int = 8, cap: int = 18) -> BergmanModel:
    cfg = ModelConfig(DomainSpec.ellipsoid(exponents, radii),
                      WeightSpec.unweighted(), truncation_degree=degree,
                      max_degree=cap)
    return BergmanModel(cfg, build_moment_table(cfg, cap))


def _relerr(measured: float, reference: float, floor: float = 1e-3) -> float:
    return abs(measured - reference) / max(abs(reference), floor)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_ball_closed_forms(seed: int = 0, ns=(1, 2), ms=(1, 2, 3),
                            points: int = 20, pairs: int = 5,
                            max_gauge: float = 0.5, rel_tol: float = 1e-8,
                            curv_tol: float = 1e-6) -> SuiteResult:
    """Series engine vs the closed-form ball kernel/metric/canonical values,
    plus origin curvature tensors against their exact expressions."""
    result = SuiteResult("ball-closed-forms", seed,
                         {"rel": rel_tol, "curvature": curv_tol})
    started = time.perf_counter()
    idx = 0
    for n in ns:
        for m in ms:
            model = _ball_model(n, m, degree=40, cap=80, prebuild=60)
            rng = sampling.generator(seed, n, m)
            for _ in range(points):
                p = sampling.interior_point(rng, model.config.domain, max_gauge)
                ref = ball_closed_forms(1.0, m, n, p)
                jet = kernel_jet(model, p)
                md = metric(model, p)
                res = {
                    "K": _relerr(jet.value, ref.K),
                    "G": float(np.linalg.norm(md.G - ref.G)
                               / np.linalg.norm(ref.G)),
                    "J": _relerr(md.det_G / jet.value, ref.J),
                    "J_tilde": _relerr(
                        md.det_G / (m ** n * jet.value ** (1.0 / m)),
                        ref.J_tilde),
                }
                result.cases.append(SuiteCase(
                    idx, {"n": n, "m": m, "gauge": model.config.domain.gauge(p)},
                    res, all(v <= rel_tol for v in res.values())))
                idx += 1
            origin = np.zeros(n, dtype=complex)
            for _ in range(pairs):
                X, Y = sampling.direction_pair(rng, n)
                ref = ball_closed_forms(1.0, m, n, origin, X, Y)
                rep = curvature_bisectional(model, origin, X, Y)
                res = {"B": _relerr(rep.B, ref.B, 1.0),
                       "H": _relerr(rep.H, ref.H, 1.0),
                       "S": _relerr(rep.S, ref.S, 1.0),
                       "T": _relerr(rep.T, ref.T, 1.0)}
                result.cases.append(SuiteCase(
                    idx, {"n": n, "m": m, "origin_tensors": True},
                    res, all(v <= curv_tol for v in res.values())))
                idx += 1
    result.info["runtime_seconds"] = time.perf_counter() - started
    return result


def suite_bergman_fuks(seed: int = 0, cases: int = 50, models=("ball", "polydisc"),
                       n: int = 2, m: int = 1, max_gauge: float = 0.4,
                       b_tol: float = 1e-6, sym_tol: float = 1e-8) -> SuiteResult:
    """Tensor-route curvature against the minimum-integral route on seeded
    (p, X, Y), including the conditional-integral symmetry."""
    result = SuiteResult("bergman-fuks", seed, {"B": b_tol, "symmetry": sym_tol})
    stream_ids = {"ball": 1, "polydisc": 2}
    idx = 0
    for kind in models:
        if kind == "ball":
            model = _ball_model(n, m, degree=40, cap=120, prebuild=60)
        elif kind == "polydisc":
            if m != 1:
                raise ConfigError("polydisc runs are unweighted (m = 1)")
            model = _polydisc_model((1.0,) * n, degree=40, cap=120, prebuild=60)
        else:
            raise ConfigError(f"unknown model kind {kind!r}")
        for k in range(cases):
            rng = sampling.generator(seed, stream_ids[kind], k)
            p = sampling.interior_point(rng, model.config.domain, max_gauge)
            X, Y = sampling.direction_pair(rng, model.dimension)
            chk = bergman_fuks_crosscheck(model, p, X, Y)
            res = {"B": chk.b_residual, "symmetry": chk.symmetry_residual,
                   "S": chk.s_residual, "J": chk.j_residual}
            result.cases.append(SuiteCase(
                idx, {"model": kind, "case": k},
                res, chk.b_residual <= b_tol and chk.symmetry_residual <= sym_tol))
            idx += 1
    return result


def suite_projection_oracle(seed: int = 0, cases: int = 100,
                            rel_tol: float = 1e-8) -> SuiteResult:
    """Projection solver against the normal-equation least-norm oracle on
    randomly drawn models, points and constraint sets."""
    result = SuiteResult("projection-oracle", seed, {"rel": rel_tol})
    kinds = ("I0", "I1", "I1_cond", "I2")
    model_cache: dict[tuple, BergmanModel] = {}
    for k in range(cases):
        rng = sampling.generator(seed, k)
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 4))
        shape = "ball" if rng.uniform() < 0.7 else "polydisc"
        key = (shape, n, m)
        if key not in model_cache:
            if shape == "ball":
                model_cache[key] = _ball_model(n, m, degree=30, cap=30,
                                               prebuild=30)
            else:
                model_cache[key] = _polydisc_model((1.0,) * n, degree=30,
                                                   cap=30, prebuild=30)
        model = model_cache[key]
        p = sampling.interior_point(rng, model.config.domain, 0.5)
        X, Y = sampling.direction_pair(rng, n)
        kind = kinds[k % len(kinds)]
        rep = min_integrals(model, p, X, Y, degree=30)
        if kind == "I0":
            constraints = [Constraint.value(1.0)]
            projected = rep.I0
        elif kind == "I1":
            constraints = [Constraint.value(0.0), Constraint.derivative(X, 1.0)]
            projected = rep.I1_X
        elif kind == "I1_cond":
            constraints = [Constraint.value(0.0), Constraint.derivative(Y, 0.0),
                           Constraint.derivative(X, 1.0)]
            projected = rep.I1_X_given_Y
        else:
            constraints = ([Constraint.value(0.0)]
                           + [Constraint.derivative(tuple(np.eye(n)[j]), 0.0)
                              for j in range(n)]
                           + [Constraint.second_derivative(X, Y, 1.0)])
            projected = rep.I2_XY
        oracle = min_integral_oracle(model, p, constraints, degree=30)
        if math.isinf(projected) and math.isinf(oracle):
            res = 0.0
        else:
            res = abs(projected - oracle) / max(abs(oracle), 1e-300)
        result.cases.append(SuiteCase(k, {"kind": kind, "shape": shape,
                                          "n": n, "m": m},
                                      {"rel": res}, res <= rel_tol))
    return result


def suite_golden_minints(tol: float = 1e-9) -> SuiteResult:
    """Golden origin values for the unweighted unit disc: I0 = pi,
    I1 = pi/2, I2 = pi/12 and the derived H = -1."""
    result = SuiteResult("golden-minints", None, {"rel": tol, "H": 1e-8})
    model = _ball_model(1, 1, degree=8, cap=18)
    e1 = (1.0,)
    rep = min_integrals(model, (0.0,), e1, e1)
    h_from_i = 2.0 - rep.I1_X ** 2 / (rep.I2_XY * rep.I0)
    golden = {"I0": math.pi, "I1": math.pi / 2, "I2": math.pi / 12}
    res = {"I0": _relerr(rep.I0, golden["I0"]),
           "I1": _relerr(rep.I1_X, golden["I1"]),
           "I2": _relerr(rep.I2_XY, golden["I2"]),
           "H": abs(h_from_i + 1.0)}
    passed = (res["I0"] <= tol and res["I1"] <= tol and res["I2"] <= tol
              and res["H"] <= 1e-8)
    result.cases.append(SuiteCase(0, {"r": 1, "m": 1, "n": 1}, res, passed))
    # closed-form arithmetic reproduces H = -1 to float precision
    arith = 2.0 - (math.pi / 2) ** 2 / ((math.pi / 12) * math.pi)
    result.info["closed_form_H_residual"] = abs(arith + 1.0)
    result.info["extra_checks_pass"] = abs(arith + 1.0) < 1e-12
    return result


def suite_monotonicity(seed: int = 0, ratios=(0.5, 0.8, 0.9), directions: int = 10,
                       ms=(1, 2), n: int = 2) -> SuiteResult:
    """Each minimum integral at the origin is non-decreasing when the ball is
    enlarged (with the matching weight family)."""
    result = SuiteResult("monotonicity", seed, {"violation": 0.0})
    idx = 0
    for m in ms:
        big = _ball_model(n, m, r=1.0, degree=8, cap=18)
        for ratio in ratios:
            small = _ball_model(n, m, r=ratio, degree=8, cap=18)
            rng = sampling.generator(seed, m, int(ratio * 100))
            origin = np.zeros(n, dtype=complex)
            for k in range(directions):
                X, Y = sampling.direction_pair(rng, n)
                lo = min_integrals(small, origin, X, Y)
                hi = min_integrals(big, origin, X, Y)
                pairs = [("I0", lo.I0, hi.I0), ("I1", lo.I1_X, hi.I1_X),
                         ("I2", lo.I2_XY, hi.I2_XY)]
                pairs += [(f"I1_flag_{j + 1}", lo.I1_flag[j], hi.I1_flag[j])
                          for j in range(n)]
                # violation = how far the small-domain value exceeds the large
                res = {name: max(0.0, (a - b) / abs(b)) for name, a, b in pairs}
                result.cases.append(SuiteCase(
                    idx, {"m": m, "ratio": ratio, "case": k}, res,
                    all(v <= 1e-12 for v in res.values())))
                idx += 1
    return result


def suite_transformation(seed: int = 0, cases: int = 10, combos=((1, 1), (1, 2), (2, 1), (2, 2)),
                         max_center: float = 0.3, max_gauge: float = 0.4,
                         closed_tol: float = 1e-10, series_tol: float = 1e-6,
                         b_tol: float = 1e-6, series_degree: int = 60) -> SuiteResult:
    """Kernel transformation rule and metric/curvature invariance under ball
    automorphisms, for both closed-form and series kernels."""
    result = SuiteResult("transformation", seed,
                         {"closed": closed_tol, "series": series_tol, "B": b_tol})
    idx = 0
    for n, m in combos:
        model = _ball_model(n, m, degree=series_degree, cap=120,
                            prebuild=series_degree + 10)
        for k in range(cases):
            rng = sampling.generator(seed, n, m, k)
            a = sampling.interior_point(rng, model.config.domain, max_center)
            z = sampling.interior_point(rng, model.config.domain, max_gauge)
            X, Y = sampling.direction_pair(rng, n)
            F = ball_automorphism(a)
            Fz = F(z)
            jac_det = F.jacobian_det(z)

            ref_z = ball_closed_forms(1.0, m, n, z)
            ref_fz = ball_closed_forms(1.0, m, n, Fz)
            closed = abs(ref_z.K - ref_fz.K * abs(jac_det) ** (2 * m)) / ref_z.K

            Kz = kernel_jet(model, z, degree=series_degree).value
            Kfz = kernel_jet(model, Fz, degree=series_degree).value
            series = abs(Kz - Kfz * abs(jac_det) ** (2 * m)) / Kz

            rep_here = curvature_bisectional(model, z, X, Y)
            J = F.jacobian(z)
            rep_there = curvature_bisectional(model, Fz, J @ X, J @ Y)
            b_res = abs(rep_here.B - rep_there.B)

            res = {"closed": closed, "series": series, "B": b_res}
            result.cases.append(SuiteCase(
                idx, {"n": n, "m": m, "case": k}, res,
                closed <= closed_tol and series <= series_tol and b_res <= b_tol))
            idx += 1
    return result


def suite_bounds_containment(seed: int = 0, pairs: int = 20,
                             ball_combos=((1, 1), (2, 1), (2, 2)),
                             ball_tol: float = 1e-6) -> SuiteResult:
    """Curvature-interval containment: the ball at s = 1 (interval degenerates
    to {0}) and an ellipsoid with the conservative inclusion bound s >= 0.8."""
    result = SuiteResult("bounds-containment", seed, {"ball_value": ball_tol})
    idx = 0
    for n, m in ball_combos:
        model = _ball_model(n, m, degree=8, cap=18)
        origin = np.zeros(n, dtype=complex)
        rng = sampling.generator(seed, n, m)
        for _ in range(pairs):
            X, Y = sampling.direction_pair(rng, n)
            rep = curvature_bisectional(model, origin, X, Y)
            report = squeezing_bounds(SqueezingBound.exact_ball(), m, n,
                                      cos2=rep.cos2, measured_B=rep.B)
            res = {"value": abs(report.value)}
            result.cases.append(SuiteCase(
                idx, {"part": "ball", "n": n, "m": m}, res,
                bool(report.contained) and abs(report.value) <= ball_tol))
            idx += 1

    model = _ellipsoid_model()
    bound = SqueezingBound.from_inclusion(0.8, 1.0)
    origin = np.zeros(2, dtype=complex)
    rng = sampling.generator(seed, 99)
    for _ in range(pairs):
        X, Y = sampling.direction_pair(rng, 2)
        rep = curvature_bisectional(model, origin, X, Y)
        report = squeezing_bounds(bound, 1, 2, cos2=rep.cos2, measured_B=rep.B)
        margin = min(report.value - report.lower, report.upper - report.value)
        result.cases.append(SuiteCase(
            idx, {"part": "ellipsoid", "s": bound.s_lower},
            {"containment_margin_deficit": max(0.0, -margin)},
            bool(report.contained)))
        idx += 1
    return result


def suite_sandwich(seed: int = 0, pairs: int = 5) -> SuiteResult:
    """All five two-sided bounds for the ellipsoid squeezed between the balls
    of radii 0.8 and 1 (unweighted), measured at the origin."""
    result = SuiteResult("sandwich", seed, {"containment": 0.0})
    model = _ellipsoid_model()
    origin = np.zeros(2, dtype=complex)
    rng = sampling.generator(seed)
    md = metric(model, origin)
    for k in range(pairs):
        X, Y = sampling.direction_pair(rng, 2)
        rep = curvature_bisectional(model, origin, X, Y)
        measured = {"X_length2": length2(md, X), "S": rep.S, "T": rep.T,
                    "J": rep.J, "J_tilde": rep.J_tilde}
        report = inclusion_sandwich(0.8, 1.0, 1, 2, X, Y, measured)
        res = {name: max(0.0, -row.slack) for name, row in report.rows.items()}
        result.cases.append(SuiteCase(k, {"pair": k}, res, report.all_contained))
    return result


def suite_trend(m_max: int = 50, final_gap: float = 0.06, ricci_tol: float = 1e-8,
                ricci_m_max: int = 5, ns=(1, 2)) -> SuiteResult:
    """Level trend of the normalised canonical value for n = 1 and the origin
    Ricci value -1/m of the weighted ball metric."""
    result = SuiteResult("trend", None,
                         {"final_gap": final_gap, "ricci": ricci_tol})
    values = [(m, ball_constant(m, 1) ** (1.0 / m) * 2.0)
              for m in range(2, m_max + 1)]
    increases = [values[i + 1][1] - values[i][1] for i in range(len(values) - 1)]
    monotone = all(d > 0 for d in increases)
    gap = abs(values[-1][1] - 1.0)
    result.info.update({
        "values": values,
        "monotone_increasing": monotone,
        "first_decrease_at_m": next((values[i][0] for i, d in enumerate(increases)
                                     if d <= 0), None),
        "final_value": values[-1][1],
        "final_gap": gap,
    })
    result.cases.append(SuiteCase(0, {"check": "monotone_increasing"},
                                  {"violations": float(sum(d <= 0 for d in increases))},
                                  monotone))
    result.cases.append(SuiteCase(1, {"check": "final_gap"},
                                  {"gap": gap}, gap < final_gap))
    idx = 2
    for n in ns:
        for m in range(1, ricci_m_max + 1):
            model = _ball_model(n, m, degree=8, cap=18)
            X = np.zeros(n, dtype=complex)
            X[0] = 1.0
            ric = ricci(model, np.zeros(n, dtype=complex), X)
            res = abs(ric - (-1.0 / m))
            result.cases.append(SuiteCase(idx, {"check": "ricci", "n": n, "m": m},
                                          {"abs": res}, res <= ricci_tol))
            idx += 1
    return result


def suite_hahn_lu(seed: int = 0, cases: int = 20, tol: float = 1e-10) -> SuiteResult:
    """Caratheodory length at the ball origin against the metric length:
    the squared ratio equals 1/(m(n+1)) exactly."""
    result = SuiteResult("hahn-lu", seed, {"ratio": tol})
    grid = [(r, m, n) for r in (0.5, 1.0, 2.0) for m in (1, 2, 3) for n in (1, 2)]
    for k in range(cases):
        rng = sampling.generator(seed, k)
        r, m, n = grid[k % len(grid)]
        X = sampling.unit_vector(rng, n) * float(rng.uniform(0.5, 2.0))
        model = _ball_model(n, m, r=r, degree=8, cap=18)
        md = metric(model, np.zeros(n, dtype=complex))
        c2 = caratheodory_origin(r, X) ** 2
        l2 = length2(md, X)
        ratio_res = abs(c2 / l2 - 1.0 / (m * (n + 1)))
        res = {"ratio": ratio_res,
               "comparison_violation": max(0.0, (c2 - l2) / l2)}
        result.cases.append(SuiteCase(k, {"r": r, "m": m, "n": n}, res,
                                      ratio_res <= tol and c2 <= l2 * (1 + 1e-12)))
    return result


SUITES = {
    "ball-closed-forms": suite_ball_closed_forms,
    "bergman-fuks": suite_bergman_fuks,
    "projection-oracle": suite_projection_oracle,
    "golden-minints": suite_golden_minints,
    "monotonicity": suite_monotonicity,
    "transformation": suite_transformation,
    "bounds-containment": suite_bounds_containment,
    "sandwich": suite_sandwich,
    "trend": suite_trend,
    "hahn-lu": suite_hahn_lu,
}


def run_suite(name: str, **options) -> SuiteResult:
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; available: "
                          f"{', '.join(sorted(SUITES))}")
    return SUITES[name](**options)
