"""Named invariant suites with measured residuals.

Each check returns a residual and a gate.  Gates that depend on quadrature
accuracy scale as ``max(base, 10 * tol)`` so that a loosened tolerance shows
up as residual growth rather than as a spurious failure.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from . import experiments, report
from .conformal import (
    ConformalPair,
    RadialFunction,
    _fd_laplacian,
    adm_mass_shift,
    compose,
    conformal_laplacian_residual,
    conformal_mean_curvature,
    conformal_scalar_curvature,
    radial_laplacian,
)
from .geometry import (
    SIXTEEN_PI,
    _h43_t,
    adm_mass,
    arclength_reparametrize,
    capacity_of_slice,
    capacity_of_zas,
    check_zas_inequality,
    combine_zas_masses,
    curvature_probe_points,
    h43_mass_limit,
    hawking_mass,
    mean_curvature,
    reg_mass_of_slice,
    zas_mass,
)
from .models import ModelSpec, build, cylinder_background, parse_model, solve_cylinder
from .numeric import QUAD_RTOL, Quadrant, integrate, limit_at_zero, solve_radial_ode
from .profile import FOUR_PI, RadialProfile, Tail, flat_segment

MODULES = ("numeric_kernel", "radial_geometry", "conformal_toolkit", "model_library", "cli")


@dataclass(frozen=True)
class InvariantResult:
    module: str
    name: str
    passed: bool
    residual: float
    gate: float
    detail: str = ""


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _gate(base, tol):
    return max(base, 10.0 * tol)


# ---------------------------------------------------------------------------
# numeric kernel


def _numeric(tol, rng):
    f = lambda x: 1.0 / (1.0 + x * x)
    whole = integrate(Quadrant(f, 0.0, 3.0), tol)
    split = integrate(Quadrant(f, 0.0, 1.3), tol) + integrate(Quadrant(f, 1.3, 3.0), tol)
    yield "integrate_additive", _rel(whole, split), _gate(2 * QUAD_RTOL, tol), ""
    c = 7.25
    scaled = integrate(Quadrant(lambda x: c * f(x), 0.0, 3.0), tol)
    yield "integrate_linear", _rel(scaled, c * whole), _gate(QUAD_RTOL, tol), ""
    coeffs = [rng.uniform(-2, 2) for _ in range(4)]
    lim = limit_at_zero(lambda x: sum(a * x**k for k, a in enumerate(coeffs)))
    yield "limit_polynomial", abs(lim - coeffs[0]), 1e-6, ""
    area = lambda t: FOUR_PI * (t + 1.0) ** 2
    sol = solve_radial_ode(lambda t: 2.0 / (t + 1.0), lambda t: 0.0, 0.0, 0.0, 1.0,
                           direction="outward", r_end=2.0)
    quad = FOUR_PI * integrate(Quadrant(lambda t: 1.0 / area(t), 0.0, 2.0), tol)
    yield "ode_matches_quadrature", _rel(sol.end_value, quad), _gate(1e-8, tol), ""


# ---------------------------------------------------------------------------
# radial geometry


def _geometry_models():
    out = {}
    for label in ("flat", "schwarzschild:m=-1", "schwarzschild:m=1", "power_law_zas:alpha=4/3",
                  "schwarzschild_with_cylinder:mbar=1,L=4"):
        out[label] = build(parse_model(label)).profile
    return out


def _geometry(tol, rng):
    models = _geometry_models()
    worst = -math.inf
    for p in models.values():
        for _ in range(20):
            r1, r2 = sorted(rng.uniform(0.01, 20.0) for _ in range(2))
            c1, c2 = capacity_of_slice(p, r1, tol), capacity_of_slice(p, r2, tol)
            worst = max(worst, (c1 - c2) / c2)
    yield "capacity_monotone", float(worst >= 0.0), 0.0, f"max (C1 - C2)/C2 = {worst:.3e}"

    p = models["schwarzschild:m=-1"]
    q = arclength_reparametrize(p)
    res = 0.0
    for rho in (0.05, 0.7, 3.0):
        res = max(res, _rel(capacity_of_slice(p, rho, tol), capacity_of_slice(q, rho, tol)),
                  _rel(reg_mass_of_slice(p, rho, tol), reg_mass_of_slice(q, rho, tol)),
                  _rel(hawking_mass(p, rho), hawking_mass(q, rho)))
    res = max(res, _rel(adm_mass(p), adm_mass(q)))
    yield "reparametrization_invariance", res, _gate(1e-8, tol), ""

    flat = RadialProfile((flat_segment(0.0, math.inf),), Tail("flat"), 2.0, "flat_minus_point")
    res = 0.0
    for rho in (0.1, 1.0, 7.5):
        res = max(res, _rel(capacity_of_slice(flat, rho, tol), FOUR_PI * rho),
                  _rel(reg_mass_of_slice(flat, rho, tol), -2.0 * rho), abs(hawking_mass(flat, rho)))
    yield "flat_closed_forms", res, _gate(1e-8, tol), ""

    res = 0.0
    for p in models.values():
        for rho in (0.3, 2.0, 9.0):
            t = p.t_at(rho)
            a = p.area_t(t)
            scale = math.sqrt(a / SIXTEEN_PI)
            res = max(res, abs(hawking_mass(p, rho) - (scale + _h43_t(p, t))) / scale)
    yield "holder_identity", res, 1e-10, "m_H = sqrt(A/16pi) - ((1/16pi) H^(4/3) A)^(3/2)"

    bad = 0.0
    for alpha in (0.3, 0.5, 0.8):
        p = build(ModelSpec("power_law_zas", {"alpha": alpha})).profile
        _, sign = capacity_of_zas(p, tol)
        if sign != "positive" or not zas_mass(p, tol).is_neg_infinity:
            bad += 1
    yield "positive_capacity_infinite_mass", bad, 0.0, "count of violations"

    res = 0.0
    for p in (models["power_law_zas:alpha=4/3"], models["schwarzschild:m=-1"]):
        res = max(res, _rel(zas_mass(p, tol).value, h43_mass_limit(p).value))
    yield "zas_mass_matches_h43", res, _gate(1e-5, tol), ""

    ms = [-rng.uniform(0.1, 3.0) for _ in range(4)]
    shuffled = ms[::-1]
    comb = combine_zas_masses(ms)
    res = _rel(comb, combine_zas_masses(shuffled))
    ok = abs(comb) > max(abs(m) for m in ms) and combine_zas_masses(ms[:1]) == ms[0]
    yield "combine_permutation_and_growth", res if ok else 1.0, 1e-14, ""

    p = build(ModelSpec("power_law_zas", {"alpha": 0.5, "tail": "vacuum"})).profile
    vals = [hawking_mass(p, 10.0**-k) for k in range(2, 16)]
    mono = all(b < a for a, b in zip(vals, vals[1:]))
    yield "hawking_mass_to_minus_infinity", 0.0 if mono and vals[-1] < -1e6 else 1.0, 0.0, f"last {vals[-1]:.3g}"


# ---------------------------------------------------------------------------
# conformal toolkit


def _conformal(tol, rng):
    res = 0.0
    for label in ("flat", "schwarzschild:m=1", "schwarzschild:m=-1", "schwarzschild_with_cylinder:mbar=1,L=4"):
        pair = build(parse_model(label)).resolution
        fitted = replace(pair, tail_coefficient=None)
        shift = adm_mass_shift(fitted)
        res = max(res, abs(adm_mass(compose(fitted)) - (adm_mass(pair.background) - shift)))
    yield "composition_consistency", res, _gate(1e-6, tol), ""

    flat = RadialProfile((flat_segment(0.0, math.inf, 1.0),), Tail("flat"), name="flat")
    u = RadialFunction.smooth(lambda t: 1 + 0.5 / (t + 1), lambda t: -0.5 / (t + 1) ** 2,
                              lambda t: 1.0 / (t + 1) ** 3)
    pair = ConformalPair(flat, u, 0.5)
    g2 = compose(pair)
    lap1 = max(abs(radial_laplacian(flat, u, t)) for t in (0.3, 1.0, 4.0))
    lap2 = 0.0
    for t in (0.3, 1.0, 4.0):
        seg = g2.segments[0]
        lap2 = max(lap2, abs(_fd_laplacian(seg.w, seg.area, seg.darea, lambda x: 1.0 / u.value(x), t, 1e-3)))
    yield "harmonicity_transport", lap2 if lap1 < 1e-8 else 1.0, 1e-6, f"Delta_1 u = {lap1:.2e}"

    worst = math.inf
    for t in curvature_probe_points(g2):
        r2 = conformal_scalar_curvature(u.value(t), radial_laplacian(flat, u, t), 0.0)
        worst = min(worst, r2)
    yield "scalar_sign_preserved", max(0.0, -worst), 1e-6, ""

    c = rng.uniform(0.5, 3.0)
    h1 = rng.uniform(0.1, 5.0)
    yield "mean_curvature_constant_factor", _rel(conformal_mean_curvature(c, 0.0, h1), h1 / c**2), 1e-15, ""

    rows = experiments.counterexample([0.8, 0.9])
    yield "bump_threshold_sign_flip", 0.0 if (rows[0][4] and not rows[1][4]) else 1.0, 0.0, ""

    k = [rng.uniform(0.1, 0.5) for _ in range(4)]
    up = RadialFunction.smooth(lambda t: 1 + k[0] * t + k[1] * t * t, lambda t: k[0] + 2 * k[1] * t,
                               lambda t: 2 * k[1])
    phi = RadialFunction.smooth(lambda t: 1 + k[2] * t**3 - k[3] * t, lambda t: 3 * k[2] * t * t - k[3],
                                lambda t: 6 * k[2] * t)
    cp = ConformalPair(flat, up)
    r1 = conformal_laplacian_residual(cp, phi, 0.5, 2e-2)
    r2 = conformal_laplacian_residual(cp, phi, 0.5, 1e-2)
    order = math.log2(abs(r1 / r2))
    yield "laplacian_identity_order", abs(order - 2.0), 0.3, f"observed order {order:.3f}"

    h_min = conformal_mean_curvature(2.0, -2.0, 4.0)
    yield "horizon_minimal", abs(h_min), 1e-10, "m = 1 horizon under u = 1 + m/2r"


# ---------------------------------------------------------------------------
# model library


def _models(tol, rng):
    res = 0.0
    for label, want in (("flat", 0.0), ("schwarzschild:m=-2", -2.0), ("schwarzschild:m=1.5", 1.5),
                        ("schwarzschild_with_cylinder:mbar=1,L=10", 3.0 / 7.0)):
        p = build(parse_model(label)).profile
        res = max(res, abs(adm_mass(p) - want))
    res = max(res, abs(adm_mass(cylinder_background(1.0, 10.0)) - 1.0))
    yield "adm_expectations", res, _gate(1e-6, tol), ""

    bad = 0
    for mbar in (0.5, 1.0, 2.0):
        for L in (0.0, 1.0, 4.0, 10.0):
            p = build(ModelSpec("schwarzschild_with_cylinder", {"mbar": mbar, "L": L})).profile
            chk = check_zas_inequality(p, tol)
            bad += (not chk.holds) + (chk.equality != (L == 0.0))
    yield "cylinder_inequality_grid", float(bad), 0.0, "violations"

    num = solve_cylinder(1.0, 10.0)
    yield "positive_adm_negative_zas", 0.0 if num["b"] > 0 > num["zas_mass"] else 1.0, 0.0, ""

    res = 0.0
    for eps in (0.1, 0.5, 2.0):
        p = build(ModelSpec("sin_bump", {"eps": eps})).profile
        res = max(res, _rel(mean_curvature(p, 0.0), 1.0 / (1.0 + eps)))
    yield "bump_boundary_mean_curvature", res, 1e-15, ""


# ---------------------------------------------------------------------------
# cli


def _cli(tol, rng):
    rows = [r.cells() for r in experiments.table2(tol)]
    a = report.csv_text(experiments.TABLE2_HEADER, rows)
    b = report.csv_text(experiments.TABLE2_HEADER, [r.cells() for r in experiments.table2(tol)])
    yield "csv_bit_stable", 0.0 if a == b else 1.0, 0.0, ""
    obj = {"rows": [dict(zip(experiments.TABLE2_HEADER, r)) for r in rows]}
    back = report.read_json(report.json_text(obj))
    yield "json_round_trip", 0.0 if back == obj else 1.0, 0.0, ""


SUITES: dict = {
    "numeric_kernel": _numeric,
    "radial_geometry": _geometry,
    "conformal_toolkit": _conformal,
    "model_library": _models,
    "cli": _cli,
}


def run_suite(module: str, tol: float = QUAD_RTOL, seed: int = 0) -> list:
    rng = random.Random(seed)
    out = []
    for name, residual, gate, detail in SUITES[module](tol, rng):
        out.append(InvariantResult(module, name, bool(residual <= gate), float(residual), float(gate), detail))
    return out


def run(scope: str = "all", tol: float = QUAD_RTOL, seed: int = 0) -> dict:
    if scope != "all" and scope not in SUITES:
        raise ValueError(f"unknown scope {scope!r}; choose 'all' or one of {MODULES}")
    mods = MODULES if scope == "all" else (scope,)
    results = [r for m in mods for r in run_suite(m, tol, seed)]
    return {
        "scope": scope,
        "tol": tol,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "invariants": results,
    }
