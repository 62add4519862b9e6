"""Geometric quantities on spherically symmetric profiles.

Slice quantities (area, mean curvature, Hawking mass, capacity, regular
mass) are evaluated on the coordinate spheres ``S_rho`` at arclength ``rho``
from the inner boundary.  Limits at the boundary are taken over concentric
spheres, which is where the supremum defining the ZAS mass is attained in
spherical symmetry.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DomainError,
    HypothesisViolated,
    NotTwiceDifferentiable,
    RouteMismatch,
    ValidationError,
)
from .numeric import (
    QUAD_RTOL,
    Divergence,
    Quadrant,
    classify_divergence,
    integrate,
    local_exponent,
    probe_limit,
)
from .profile import FOUR_PI, RadialProfile, Segment

SIXTEEN_PI = 16.0 * math.pi
ROUTE_RTOL = 1e-5
ZERO_SNAP = 1e-6
EQUALITY_RTOL = 1e-6
CURVATURE_FLOOR = -1e-8


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class ExtendedMass:
    """A mass in ``[-inf, 0]``."""

    value: float

    def __post_init__(self):
        if math.isnan(self.value) or self.value > 0:
            raise DomainError(f"ZAS masses lie in [-inf, 0], got {self.value!r}")

    @property
    def is_neg_infinity(self) -> bool:
        return self.value == -math.inf

    @property
    def is_zero(self) -> bool:
        return self.value == 0.0

    def __float__(self):
        return float(self.value)

    def __str__(self):
        return "-inf" if self.is_neg_infinity else repr(self.value)

    def to_json(self) -> dict:
        if self.is_neg_infinity:
            return {"kind": "neg_infinity"}
        return {"kind": "finite", "value": self.value}

    @classmethod
    def from_json(cls, obj: dict) -> "ExtendedMass":
        if obj["kind"] == "neg_infinity":
            return cls(-math.inf)
        return cls(float(obj["value"]))


@dataclass(frozen=True)
class SliceReport:
    rho: float
    area: float
    mean_curvature: float
    hawking_mass: float
    slice_capacity: float
    slice_reg_mass: float


@dataclass(frozen=True)
class ZasReport:
    is_zas: bool
    capacity: float
    capacity_sign: str
    mass: ExtendedMass
    regular: bool
    harmonically_regular: bool
    removable: bool
    origin_exponent: float
    exponent_declared: bool
    leading_coefficient: float
    log_slope: Optional[float]

    def to_json(self) -> dict:
        out = asdict(self)
        out["mass"] = self.mass.to_json()
        return out


# ---------------------------------------------------------------------------
# pointwise slice geometry


def arclength_reparametrize(p: RadialProfile) -> RadialProfile:
    """Equivalent profile whose coordinate is arclength (unit lapse)."""
    if p.unit_lapse:
        return p
    segs = []
    for i, seg in enumerate(p.segments):
        s0 = p.arclength_t(seg.start) if i else 0.0
        s1 = math.inf if math.isinf(seg.end) else p.arclength_t(seg.end)

        def derivs(s, seg=seg):
            return p.area_s_derivs_t(p.t_at(s))

        tail = None
        if seg.tail_integral is not None:
            tail = lambda s, seg=seg: seg.tail_integral(p.t_at(s))
        segs.append(Segment(
            s0, s1,
            lambda s, seg=seg: seg.area(p.t_at(s)),
            lambda s, d=derivs: d(s)[1],
            lambda s, d=derivs: d(s)[2],
            tail_integral=tail,
            label=seg.label,
        ))
    return RadialProfile(tuple(segs), p.tail, p.origin_exponent, p.name)


def _mean_curvature_t(p, t, side="right"):
    seg = p.segment_at(t, side)
    return seg.darea(t) / (seg.w(t) * seg.area(t))


def _hawking_mass_t(p, t, side="right"):
    a = p.area_t(t, side)
    h = _mean_curvature_t(p, t, side)
    return math.sqrt(a / SIXTEEN_PI) * (1.0 - h * h * a / SIXTEEN_PI)


def mean_curvature(p: RadialProfile, rho: float) -> float:
    """``H = A'/A`` in arclength, i.e. ``A_t/(w A)`` natively."""
    return _mean_curvature_t(p, p.t_at(rho))


def hawking_mass(p: RadialProfile, rho: float) -> float:
    return _hawking_mass_t(p, p.t_at(rho))


def area(p: RadialProfile, rho: float) -> float:
    return p.area_t(p.t_at(rho))


def _capacity_t(p, t, rel_tol=QUAD_RTOL):
    return 1.0 / p.inverse_area_integral_t(t, rel_tol)


def _reg_mass_t(p, t, rel_tol=QUAD_RTOL):
    ratio = p.area_t(t) ** -0.25 / p.inverse_area_integral_t(t, rel_tol)
    return -ratio * ratio / (4.0 * math.pi**1.5)


def harmonic_potential(p: RadialProfile, rho: float, r: float, rel_tol: float = QUAD_RTOL) -> float:
    """Harmonic function vanishing on ``S_rho`` and tending to 1 at infinity, at ``S_r``."""
    if not (0 < rho <= r):
        raise ValueError(f"need 0 < rho <= r, got rho={rho}, r={r}")
    if r == rho:
        return 0.0
    t_rho, t_r = p.t_at(rho), p.t_at(r)
    total = p.inverse_area_integral_t(t_rho, rel_tol)
    outer = p.inverse_area_integral_t(t_r, rel_tol)
    return (total - outer) / total


def capacity_of_slice(p: RadialProfile, rho: float, rel_tol: float = QUAD_RTOL) -> float:
    """``C(S_rho) = (int_rho^inf ds/A)^-1``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return _capacity_t(p, p.t_at(rho), rel_tol)


def reg_mass_of_slice(p: RadialProfile, rho: float, rel_tol: float = QUAD_RTOL) -> float:
    """Regular mass of ``S_rho`` viewed as a harmonically resolved ZAS."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return _reg_mass_t(p, p.t_at(rho), rel_tol)


def slice_report(p: RadialProfile, rho: float, rel_tol: float = QUAD_RTOL) -> SliceReport:
    t = p.t_at(rho)
    return SliceReport(
        rho=rho,
        area=p.area_t(t),
        mean_curvature=_mean_curvature_t(p, t),
        hawking_mass=_hawking_mass_t(p, t),
        slice_capacity=_capacity_t(p, t, rel_tol),
        slice_reg_mass=_reg_mass_t(p, t, rel_tol),
    )


# ---------------------------------------------------------------------------
# boundary behaviour


def _require_zas(p):
    if not p.is_zas:
        raise DomainError(f"profile {p.name!r} has no zero area singularity (A(0) = {p.inner_area})")


def _probe_start(p) -> float:
    first = p.segments[0]
    return 0.5 * first.end if math.isfinite(first.end) else 0.5


def boundary_divergence(p: RadialProfile) -> Divergence:
    """Whether ``int_0 ds/A`` diverges at the inner boundary."""
    first = p.segments[0]
    end = first.end if math.isfinite(first.end) else 1.0
    if p.origin_exponent is not None:
        s_end = p.arclength_t(end)
        q = Quadrant(lambda s: 1.0 / p.area_t(p.t_at(s)), 0.0, s_end, (-p.origin_exponent, None))
        return classify_divergence(q)
    q = Quadrant(lambda t: first.w(t) / first.area(t), 0.0, end)
    return classify_divergence(q, delta=1e-8 * end)


def capacity_of_zas(p: RadialProfile, rel_tol: float = QUAD_RTOL) -> tuple:
    """``(C(Sigma), sign)`` with ``C = (int_0^inf ds/A)^-1``; sign is "zero" or "positive"."""
    _require_zas(p)
    if boundary_divergence(p) is Divergence.DIVERGENT:
        return 0.0, "zero"
    first = p.segments[0]
    end = first.end if math.isfinite(first.end) else 1.0
    f = lambda t: first.w(t) / first.area(t)
    e = local_exponent(f, 0.0, "right", 1e-8 * end)
    inner = integrate(Quadrant(f, 0.0, end, (e, None)), rel_tol)
    outer = p.inverse_area_integral_t(end, rel_tol) if math.isfinite(first.end) else 0.0
    return 1.0 / (inner + outer), "positive"


def _snap(v):
    return 0.0 if abs(v) <= ZERO_SNAP else v


def _routes_agree(a, b):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= ROUTE_RTOL * max(abs(a), abs(b)) + ZERO_SNAP


def _analytic_route_t(p, t):
    a, da, _ = p.area_s_derivs_t(t)
    x = a**-0.25 * da
    return -x * x / (64.0 * math.pi**1.5)


def _h43_t(p, t):
    a = p.area_t(t)
    h = abs(_mean_curvature_t(p, t))
    return -((h ** (4.0 / 3.0) * a / SIXTEEN_PI) ** 1.5)


def zas_mass_routes(p: RadialProfile, rel_tol: float = QUAD_RTOL) -> tuple:
    """Limits of the slice regular mass and of its differentiated form, unsnapped."""
    start = _probe_start(p)
    flux = probe_limit(lambda t: _reg_mass_t(p, t, rel_tol), start=start).extrapolant
    analytic = probe_limit(lambda t: _analytic_route_t(p, t), start=start).extrapolant
    return flux, analytic


def zas_mass(p: RadialProfile, rel_tol: float = QUAD_RTOL) -> ExtendedMass:
    """Mass of the ZAS at the inner boundary.

    Positive capacity forces ``-inf``.  Otherwise the slice regular masses are
    extrapolated to the boundary and cross-checked against the limit of
    ``-(A^{-1/4} dA/ds)^2 / (64 pi^{3/2})``.
    """
    _require_zas(p)
    _, sign = capacity_of_zas(p, rel_tol)
    if sign == "positive":
        return ExtendedMass(-math.inf)
    flux, analytic = zas_mass_routes(p, rel_tol)
    if not _routes_agree(flux, analytic):
        raise RouteMismatch(f"flux route {flux!r} vs derivative route {analytic!r}")
    return ExtendedMass(_snap(flux))


def h43_mass_limit(p: RadialProfile) -> ExtendedMass:
    """``-lim ((1/16 pi) H^{4/3} A)^{3/2}`` over concentric spheres."""
    _require_zas(p)
    v = probe_limit(lambda t: _h43_t(p, t), start=_probe_start(p)).extrapolant
    return ExtendedMass(_snap(v))


def adm_mass(p: RadialProfile) -> float:
    """ADM mass: exact for declared tails, else the limit of centred Hawking masses."""
    if p.tail.kind in ("flat", "schwarzschild"):
        return p.tail.mass
    t0 = max(10.0, 2.0 * p.segments[-1].start)
    return probe_limit(lambda x: _hawking_mass_t(p, 1.0 / x), start=1.0 / t0).extrapolant


def scalar_curvature(p: RadialProfile, rho: float, side: Optional[str] = None) -> float:
    """Scalar curvature ``8pi/A + A'^2/(2A^2) - 2A''/A`` (arclength derivatives)."""
    t = p.t_at(rho)
    if side is None:
        for j in p.joins:
            if abs(t - j) <= 1e-12 * max(1.0, j):
                left, right = _scalar_t(p, j, "left"), _scalar_t(p, j, "right")
                if abs(left - right) > 1e-8 * max(1.0, abs(left), abs(right)):
                    raise NotTwiceDifferentiable(
                        f"second derivative jumps at arclength {rho}", left=left, right=right)
                return right
        side = "right"
    return _scalar_t(p, t, side)


def _scalar_terms_t(p, t, side="right"):
    a, da, d2a = p.area_s_derivs_t(t, side)
    return 2 * FOUR_PI / a, da * da / (2 * a * a), -2 * d2a / a


def _scalar_t(p, t, side="right"):
    return sum(_scalar_terms_t(p, t, side))


def curvature_probe_points(p: RadialProfile, n: int = 40) -> list:
    """Native coordinates used to test the sign of scalar curvature, away from joins."""
    pts = []
    for i, seg in enumerate(p.segments):
        hi = seg.end if math.isfinite(seg.end) else seg.start + 10.0 * (1.0 + seg.start)
        if i == 0:
            ts = np.geomspace(1e-3 * hi, hi, n + 2)[:-1]
        else:
            ts = np.linspace(seg.start, hi, n + 2)[1:-1]
        pts.extend(float(t) for t in ts)
    return pts


def check_nonnegative_scalar_curvature(p: RadialProfile) -> float:
    """Minimum scaled curvature over the probes; raises if it is negative beyond noise."""
    worst = math.inf
    for t in curvature_probe_points(p):
        terms = _scalar_terms_t(p, t)
        r = sum(terms)
        scale = max(1.0, sum(abs(x) for x in terms))
        worst = min(worst, r / scale)
        if r < CURVATURE_FLOOR * scale:
            raise HypothesisViolated(f"negative scalar curvature {r:.3e} at t = {t:.6g}")
    return worst


def omae_radius(p: RadialProfile) -> float:
    """Arclength of the outermost area-minimising round sphere (0 if ``A`` is increasing)."""
    ts = []
    for i, seg in enumerate(p.segments):
        hi = seg.end if math.isfinite(seg.end) else seg.start + 10.0 * (1.0 + seg.start)
        if i == 0 and p.is_zas:
            ts.extend(np.geomspace(1e-12 * hi, hi, 400))
        else:
            ts.extend(np.linspace(seg.start, hi, 401))
    ts = np.array(sorted(set([0.0] + [float(t) for t in ts])))
    areas = np.array([p.area_t(t, "left") if t > 0 else p.inner_area for t in ts])
    amin = areas.min()
    j = int(np.nonzero(areas <= amin * (1 + 1e-12) + 1e-300)[0][-1])
    t_best = ts[j]
    if 0 < j < len(ts) - 1:
        lo, hi = ts[j - 1], ts[j + 1]
        seg = p.segment_at(t_best)
        if seg.start <= lo and hi <= seg.end and seg.darea(lo) < 0 < seg.darea(hi):
            t_best = brentq(seg.darea, lo, hi, xtol=1e-300, rtol=1e-15)
    return p.arclength_t(t_best)


# ---------------------------------------------------------------------------
# classification


def leading_area_coefficient(p: RadialProfile, exponent: float) -> float:
    """``lim A(s)/s**exponent`` at the boundary."""
    first = p.segments[0]
    return probe_limit(
        lambda t: first.area(t) / p._segment_arclength(first, 0.0, t) ** exponent,
        start=_probe_start(p),
    ).extrapolant


def classify_zas(p: RadialProfile, rel_tol: float = QUAD_RTOL) -> ZasReport:
    from .conformal import canonical_resolution, harmonic_resolution_test

    _require_zas(p)
    if not p.c1_joins:
        raise ValidationError("c1_joins", "classification requires C^1 joins between segments")
    capacity, sign = capacity_of_zas(p, rel_tol)
    mass = zas_mass(p, rel_tol)
    declared = p.origin_exponent is not None
    exponent = p.origin_exponent if declared else p.measured_origin_exponent(1e-8 * _probe_start(p))
    etol = 1e-6 if declared else 1e-3
    regular = abs(exponent - 4.0 / 3.0) <= etol
    coeff = leading_area_coefficient(p, exponent)
    removable = abs(exponent - 2.0) <= etol and abs(coeff - FOUR_PI) <= 1e-6 * FOUR_PI
    log_slope = None
    harmonic = False
    if regular:
        background, phibar = canonical_resolution(p)
        res = harmonic_resolution_test(background, phibar)
        harmonic, log_slope = res.harmonically_regular, res.log_slope
    return ZasReport(
        is_zas=True,
        capacity=capacity,
        capacity_sign=sign,
        mass=mass,
        regular=regular,
        harmonically_regular=harmonic,
        removable=removable,
        origin_exponent=exponent,
        exponent_declared=declared,
        leading_coefficient=coeff,
        log_slope=log_slope,
    )


def combine_zas_masses(masses: Iterable[float]) -> float:
    """Regular mass of a union: ``-(sum |m_i|^{2/3})^{3/2}``; ``-inf`` absorbs."""
    ms = [float(m) for m in masses]
    if not ms:
        raise DomainError("need at least one mass")
    if any(not (m < 0) for m in ms):
        raise DomainError(f"ZAS masses must be negative, got {ms}")
    if any(math.isinf(m) for m in ms):
        return -math.inf
    if len(ms) == 1:
        return ms[0]
    return -(sum((-m) ** (2.0 / 3.0) for m in ms) ** 1.5)


def combine_bh_masses(masses: Iterable[float]) -> float:
    """Black hole mass of a union of horizons: ``(sum m_i^2)^{1/2}``."""
    ms = [float(m) for m in masses]
    if not ms or any(not (m > 0) for m in ms):
        raise DomainError(f"black hole masses must be positive, got {ms}")
    if len(ms) == 1:
        return ms[0]
    return math.hypot(*ms)


# ---------------------------------------------------------------------------
# inequalities


@dataclass(frozen=True)
class ZasInequality:
    adm: float
    zas_mass: ExtendedMass
    holds: bool
    equality: bool


@dataclass(frozen=True)
class PenroseCheck:
    adm: float
    horizon_area: float
    holds: bool
    equality: bool


def check_zas_inequality(p: RadialProfile, rel_tol: float = QUAD_RTOL) -> ZasInequality:
    """Evaluate ``m_ADM >= m_ZAS`` after checking nonnegative scalar curvature."""
    check_nonnegative_scalar_curvature(p)
    m = adm_mass(p)
    mz = zas_mass(p, rel_tol)
    tol = EQUALITY_RTOL * (1.0 + abs(m))
    if mz.is_neg_infinity:
        return ZasInequality(m, mz, True, False)
    return ZasInequality(m, mz, m >= mz.value - tol, abs(m - mz.value) <= tol)


def check_penrose(p: RadialProfile) -> PenroseCheck:
    """Evaluate ``m_ADM >= sqrt(A/16pi)`` with ``A`` the area of the outermost minimiser."""
    check_nonnegative_scalar_curvature(p)
    m = adm_mass(p)
    a = p.area_t(p.t_at(omae_radius(p)))
    bound = math.sqrt(a / SIXTEEN_PI)
    tol = EQUALITY_RTOL * (1.0 + abs(m))
    return PenroseCheck(m, a, m >= bound - tol, abs(m - bound) <= tol)


def regular_mass_from_resolution(boundary_area: float, normal_derivative: float) -> float:
    """Flux definition for a round boundary with constant ``nu(phibar)``."""
    return -(normal_derivative ** (4.0 / 3.0) * boundary_area / math.pi) ** 1.5 / 4.0
