"""Concrete metrics with closed-form reference values, and profile files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Optional

import jsonschema

from .conformal import ConformalPair, LocalWarp, RadialFunction, compose, constant_function
from .errors import InvalidSpec, ParseError, ValidationError
from .numeric import ODE_RTOL, solve_radial_ode
from .profile import (
    FOUR_PI,
    RadialProfile,
    Segment,
    Tail,
    cylinder_segment,
    flat_segment,
    hermite_segment,
    isotropic_segment,
    power_segment,
)

KINDS = ("flat", "schwarzschild", "power_law_zas", "schwarzschild_with_cylinder", "sin_bump", "custom")
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        k, p = self.kind, self.params
        if k not in KINDS:
            raise InvalidSpec(f"unknown model kind {k!r}")
        need = {
            "flat": (),
            "schwarzschild": ("m",),
            "power_law_zas": ("alpha",),
            "schwarzschild_with_cylinder": ("mbar", "L"),
            "sin_bump": ("eps",),
            "custom": ("path",),
        }[k]
        missing = [n for n in need if n not in p]
        if missing:
            raise InvalidSpec(f"{k} needs parameters {missing}")
        if k == "power_law_zas":
            if not p["alpha"] > 0:
                raise InvalidSpec("power_law_zas needs alpha > 0")
            if p.get("tail", "blend") not in ("blend", "vacuum"):
                raise InvalidSpec("power_law_zas tail is 'blend' or 'vacuum'")
        if k == "schwarzschild_with_cylinder" and not (p["mbar"] > 0 and p["L"] >= 0):
            raise InvalidSpec("schwarzschild_with_cylinder needs mbar > 0 and L >= 0")
        if k == "sin_bump" and not p["eps"] > 0:
            raise InvalidSpec("sin_bump needs eps > 0")

    @property
    def label(self) -> str:
        if not self.params:
            return self.kind
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}:{args}"


def _number(text: str):
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        return float(text)


def parse_model(text: str) -> ModelSpec:
    """``kind`` or ``kind:key=value,...``; numeric values accept fractions like ``4/3``."""
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise InvalidSpec(f"malformed model parameter {item!r}")
        key = key.strip()
        if key in ("path", "tail"):
            params[key] = val.strip()
        else:
            try:
                params[key] = _number(val.strip())
            except ValueError as exc:
                raise InvalidSpec(f"bad value for {key}: {val!r}") from exc
    return ModelSpec(kind.strip(), params)


@dataclass(frozen=True)
class Model:
    spec: ModelSpec
    profile: RadialProfile
    resolution: Optional[ConformalPair] = None
    reference: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# closed forms


def cylinder_reference(mbar: float, L: float) -> dict:
    """Parameters of the harmonic resolution over Schwarzschild with a cylinder of length ``L``."""
    a = L / (L + 4.0 * mbar)
    b = mbar * (L - 4.0 * mbar) / (L + 4.0 * mbar)
    return {"a": a, "b": b, "zas_mass": -16.0 * mbar**3 / (L + 4.0 * mbar) ** 2}


def power_law_mass(alpha: float) -> float:
    """ZAS mass of ``dr^2 + r^alpha dsigma^2``."""
    if alpha < 4.0 / 3.0:
        return -math.inf
    return -2.0 / 9.0 if alpha == 4.0 / 3.0 else 0.0


def bump_threshold() -> float:
    """Largest bump parameter for which the minimal-boundary factor vanishes."""
    return math.sqrt(1.0 + math.pi**2 / 4.0) - 1.0


def bump_integral(eps: float) -> float:
    """``int_0^{2pi} dt / (1 + eps + sin t)``."""
    return TWO_PI / math.sqrt(eps * eps + 2.0 * eps)


# ---------------------------------------------------------------------------
# builders


def _flat(_):
    p = RadialProfile((flat_segment(0.0, math.inf),), Tail("flat"), 2.0, name="flat")
    return p, ConformalPair(p, constant_function(1.0), 0.0), {"adm_mass": 0.0}


def _isotropic_factor(m, offset):
    """``u = 1 + m/(2r)`` with ``r = t + offset``, written to keep a boundary zero exact."""
    shift = offset + 0.5 * m
    return RadialFunction.smooth(
        lambda t: (t + shift) / (t + offset),
        lambda t: -0.5 * m / (t + offset) ** 2,
        lambda t: m / (t + offset) ** 3,
    )


def _schwarzschild(params):
    m = float(params["m"])
    if m == 0:
        return _flat(params)
    offset = -0.5 * m if m < 0 else 0.25 * m
    join = 2.0 * abs(m) if m < 0 else 0.25 * m
    segs = (isotropic_segment(0.0, join, m, offset), isotropic_segment(join, math.inf, m, offset))
    exponent = 4.0 / 3.0 if m < 0 else None
    profile = RadialProfile(segs, Tail("schwarzschild", m), exponent, name=f"schwarzschild({m:g})")
    flat = RadialProfile((flat_segment(0.0, math.inf, offset),), Tail("flat"), name="flat")
    ref = {"adm_mass": m}
    if m < 0:
        ref["zas_mass"] = m
    else:
        ref["horizon_area"] = 16.0 * math.pi * m * m
    return profile, ConformalPair(flat, _isotropic_factor(m, offset), 0.5 * m), ref


def _power_law(params):
    alpha = float(params["alpha"])
    tail = params.get("tail", "blend")
    head = power_segment(0.0, 1.0, alpha)
    if tail == "blend":
        segs = (head,
                hermite_segment(1.0, 2.0, FOUR_PI, FOUR_PI * alpha, 16.0 * math.pi, 16.0 * math.pi),
                flat_segment(2.0, math.inf))
        profile = RadialProfile(segs, Tail("flat"), alpha, name=f"power_law({alpha:g})")
        return profile, None, {"adm_mass": 0.0, "zas_mass": power_law_mass(alpha)}
    m = 0.5 * (1.0 - alpha * alpha / 4.0)
    r0 = (0.5 * (1.0 + alpha / 2.0)) ** 2
    segs = (head, isotropic_segment(1.0, math.inf, m, r0 - 1.0))
    profile = RadialProfile(segs, Tail("schwarzschild", m), alpha, name=f"power_law({alpha:g}, vacuum)")
    return profile, None, {"adm_mass": m, "zas_mass": power_law_mass(alpha)}


def cylinder_background(mbar: float, L: float) -> RadialProfile:
    segs = []
    if L > 0:
        segs.append(cylinder_segment(0.0, L, 16.0 * math.pi * mbar * mbar))
    segs.append(isotropic_segment(L, math.inf, mbar, 0.5 * mbar - L))
    return RadialProfile(tuple(segs), Tail("schwarzschild", mbar), name=f"cylinder_background({mbar:g},{L:g})")


def cylinder_resolution(mbar: float, L: float) -> RadialFunction:
    ref = cylinder_reference(mbar, L)
    a, b = ref["a"], ref["b"]
    offset = 0.5 * mbar - L
    top = offset + 0.5 * b  # r + b/2 = t + top
    bottom = offset + 0.5 * mbar

    def f(t):
        return (t + top) / (t + bottom)

    def df(t):
        return (bottom - top) / (t + bottom) ** 2

    def d2f(t):
        return -2.0 * (bottom - top) / (t + bottom) ** 3

    outer = (f, df, d2f)
    if L == 0:
        return RadialFunction((outer,))
    k = a / L
    inner = (lambda t: k * t, lambda t: k, lambda t: 0.0)
    return RadialFunction.piecewise((L,), (inner, outer))


def _cylinder(params):
    mbar, L = float(params["mbar"]), float(params["L"])
    bg = cylinder_background(mbar, L)
    ref = cylinder_reference(mbar, L)
    pair = ConformalPair(bg, cylinder_resolution(mbar, L), 0.5 * (ref["b"] - mbar))
    profile = compose(pair, name=f"schwarzschild_with_cylinder({mbar:g},{L:g})")
    return profile, pair, dict(ref, adm_mass=ref["b"], background_adm_mass=mbar,
                               background_horizon_area=16.0 * math.pi * mbar * mbar)


def sin_bump_segment(eps: float, end: float = TWO_PI) -> Segment:
    return Segment(
        0.0, end,
        lambda t: FOUR_PI * (1.0 + eps + math.sin(t)),
        lambda t: FOUR_PI * math.cos(t),
        lambda t: -FOUR_PI * math.sin(t),
        label="sin_bump",
    )


def _sin_bump(params):
    eps = float(params["eps"])
    t1 = TWO_PI + 2.0
    segs = (sin_bump_segment(eps),
            hermite_segment(TWO_PI, t1, FOUR_PI * (1.0 + eps), FOUR_PI, FOUR_PI * t1 * t1, 2.0 * FOUR_PI * t1),
            flat_segment(t1, math.inf))
    profile = RadialProfile(segs, Tail("flat"), name=f"sin_bump({eps:g})")
    return profile, None, {
        "adm_mass": 0.0,
        "boundary_mean_curvature": 1.0 / (1.0 + eps),
        "vanishes": bump_integral(eps) > 4.0,
    }


def build(spec: ModelSpec) -> Model:
    if spec.kind == "custom":
        profile = load_profile(spec.params["path"])
        return Model(spec, profile)
    builder = {
        "flat": _flat,
        "schwarzschild": _schwarzschild,
        "power_law_zas": _power_law,
        "schwarzschild_with_cylinder": _cylinder,
        "sin_bump": _sin_bump,
    }[spec.kind]
    profile, pair, ref = builder(spec.params)
    return Model(spec, profile, pair, ref)


def exp_warp():
    """Background ``dr^2 + e^r dsigma^2`` near ``r = 0`` with ``phibar = r``."""
    bg = LocalWarp(
        w=lambda t: 1.0,
        dw=lambda t: 0.0,
        area=lambda t: FOUR_PI * math.exp(t),
        darea=lambda t: FOUR_PI * math.exp(t),
        t_max=1.0,
    )
    return bg, RadialFunction.smooth(lambda t: t, lambda t: 1.0, lambda t: 0.0)


# ---------------------------------------------------------------------------
# cylinder model by shooting


def solve_cylinder(mbar: float, L: float, rtol: float = ODE_RTOL) -> dict:
    """Recompute ``a``, ``b`` and the ZAS mass from the radial harmonic ODE.

    ``v`` solves the radial Laplace equation with ``v(0) = 0``, ``v'(0) = 1``
    and is continued through the cylinder and the exterior with matched value
    and slope; the closed-form tail of ``int ds/A`` supplies ``v(inf)``.
    """
    bg = cylinder_background(mbar, L)

    def coeff(seg):
        return lambda t: seg.darea(t) / seg.area(t) - seg.dw(t) / seg.w(t)

    value, slope = 0.0, 1.0
    for seg, nxt in zip(bg.segments[:-1], bg.segments[1:]):
        sol = solve_radial_ode(coeff(seg), lambda t: 0.0, seg.start, value, slope,
                               direction="outward", r_end=seg.end, rtol=rtol)
        # the unit normal derivative v_t / w is what stays continuous
        value, slope = sol.end_value, sol.end_slope * nxt.w(seg.end) / seg.w(seg.end)
    outer = bg.segments[-1]
    t_far = outer.start + 10.0 * mbar
    sol = solve_radial_ode(coeff(outer), lambda t: 0.0, outer.start, value, slope,
                           direction="outward", r_end=t_far, rtol=rtol)
    flux = sol.end_slope * outer.area(t_far) / outer.w(t_far)
    v_inf = sol.end_value + flux * outer.tail_integral(t_far)
    nu0 = 1.0 / (v_inf * bg.lapse_t(0.0))  # normal derivative of phibar on the boundary
    a0 = bg.area_t(0.0)
    return {
        "a": L / v_inf if L > 0 else 0.0,
        "b": mbar - nu0 * a0 / TWO_PI,
        "zas_mass": -(nu0**2) * a0**1.5 / (4.0 * math.pi**1.5),
    }


# ---------------------------------------------------------------------------
# profile files


def _schema():
    return json.loads(resources.files("zas").joinpath("profile_schema.json").read_text())


def _segment_from_json(obj):
    kind, prm = obj["kind"], obj["params"]
    lo, hi = obj["interval"]
    hi = math.inf if hi == "inf" else float(hi)
    if lo == "inf":
        raise ValidationError("segments_contiguous", "segment starts at infinity")
    lo = float(lo)
    try:
        if kind == "power_law":
            return power_segment(lo, hi, prm["alpha"], prm.get("coeff", 1.0))
        if kind == "cylinder":
            return cylinder_segment(lo, hi, prm["area"])
        if kind == "flat":
            return flat_segment(lo, hi, prm.get("offset", 0.0))
        if kind == "schwarzschild":
            return isotropic_segment(lo, hi, prm["m"], prm["offset"])
        if kind == "hermite":
            return hermite_segment(lo, hi, prm["a0"], prm["da0"], prm["a1"], prm["da1"])
        return sin_bump_segment(prm["eps"], hi)
    except KeyError as exc:
        raise ParseError(f"{kind} segment is missing parameter {exc.args[0]!r}") from exc


def _declared_exponent(first):
    kind, prm = first["kind"], first["params"]
    if kind == "power_law":
        return float(prm["alpha"])
    if kind == "flat" and prm.get("offset", 0.0) == 0.0:
        return 2.0
    if kind == "schwarzschild" and prm["m"] < 0 and prm["offset"] == -0.5 * prm["m"]:
        return 4.0 / 3.0
    return None


def profile_from_json(doc: dict, name: str = "") -> RadialProfile:
    if isinstance(doc, dict) and ("tail" not in doc or "kind" not in (doc.get("tail") or {})):
        raise ValidationError("tail_declared", "profile has no tail kind")
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ParseError(f"schema violation at {where}: {exc.message}") from exc
    if doc["coordinate"]["start"] != 0:
        raise ValidationError("segments_contiguous", "the coordinate must start at 0")
    segs = tuple(_segment_from_json(s) for s in doc["segments"])
    tail = doc["tail"]
    tail = Tail(tail["kind"], float(tail.get("params", {}).get("mass", 0.0)))
    first = doc["segments"][0]
    exponent = _declared_exponent(first) if first["interval"][0] == 0 else None
    return RadialProfile(segs, tail, exponent, doc.get("name", name))


def load_profile(path) -> RadialProfile:
    """Read and validate a JSON profile file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return profile_from_json(doc, name=str(path))
