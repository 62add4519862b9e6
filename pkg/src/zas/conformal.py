"""Conformal changes ``g2 = u^4 g1`` of warped-product metrics.

Radial functions are given in the background's native coordinate ``t``.
Piecewise factors (such as a resolution function glued across a horizon)
carry their break points so that one-sided derivatives are used at joins.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DomainError,
    FactorVanishesInterior,
    NoExpansion,
    Oscillatory,
    ResolutionInvalid,
    ZasError,
)
from .numeric import Quadrant, integrate, local_exponent, probe_limit, solve_radial_ode
from .profile import FOUR_PI, RadialProfile, Segment, Tail

FIT_WINDOW = (1e-6, 1e-3)
LOG_SLOPE_GATE = 1e-3


# ---------------------------------------------------------------------------
# radial functions


@dataclass(frozen=True)
class RadialFunction:
    """A function of the native coordinate with first and second derivatives.

    ``pieces[k]`` applies on ``[breaks[k-1], breaks[k])``.
    """

    pieces: tuple
    breaks: tuple = ()

    @classmethod
    def smooth(cls, f: Callable, df: Callable, d2f: Optional[Callable] = None) -> "RadialFunction":
        return cls(((f, df, d2f),))

    @classmethod
    def piecewise(cls, breaks, pieces) -> "RadialFunction":
        if len(pieces) != len(breaks) + 1:
            raise ValueError("need one more piece than break points")
        return cls(tuple(tuple(p) for p in pieces), tuple(breaks))

    def _piece(self, t, side):
        k = bisect.bisect_left(self.breaks, t) if side == "left" else bisect.bisect_right(self.breaks, t)
        return self.pieces[k]

    def value(self, t, side="right"):
        return self._piece(t, side)[0](t)

    def d1(self, t, side="right"):
        return self._piece(t, side)[1](t)

    def d2(self, t, side="right"):
        d2f = self._piece(t, side)[2]
        if d2f is None:
            raise ValueError("second derivative not supplied")
        return d2f(t)

    def __call__(self, t):
        return self.value(t)


def constant_function(c: float) -> RadialFunction:
    return RadialFunction.smooth(lambda t: c, lambda t: 0.0, lambda t: 0.0)


@dataclass(frozen=True)
class ConformalPair:
    """Background metric and a factor ``u``; ``tail_coefficient`` is ``c`` in ``u ~ 1 + c/r``."""

    background: RadialProfile
    factor: RadialFunction
    tail_coefficient: Optional[float] = None


@dataclass(frozen=True)
class LocalWarp:
    """A warped product known only near its inner boundary ``t = 0``."""

    w: Callable
    dw: Callable
    area: Callable
    darea: Callable
    t_max: float
    _lapse_exponent: float = field(default=0.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        e = local_exponent(self.w, 0.0, "right", 1e-6 * self.t_max)
        object.__setattr__(self, "_lapse_exponent", e if abs(e) > 1e-6 else 0.0)

    def lapse_t(self, t, side="right"):
        return self.w(t)

    def dlapse_t(self, t, side="right"):
        return self.dw(t)

    def area_t(self, t, side="right"):
        return self.area(t)

    def darea_t(self, t, side="right"):
        return self.darea(t)

    def arclength_t(self, t):
        if t <= 0:
            return 0.0
        e = self._lapse_exponent if self._lapse_exponent else None
        return integrate(Quadrant(self.w, 0.0, t, (e, None)), 1e-12)


def canonical_resolution(p: RadialProfile):
    """Round-cylinder background ``(w/phibar^2, 4pi)`` with ``phibar = (A/4pi)^{1/4}``.

    Only the first segment is used; the result is a local resolution.
    """
    seg = p.segments[0]
    t_max = seg.end if math.isfinite(seg.end) else 1.0

    def phi(t):
        return (seg.area(t) / FOUR_PI) ** 0.25

    def dphi(t):
        return phi(t) * seg.darea(t) / (4.0 * seg.area(t))

    def d2phi(t):
        a, da, d2a = seg.area(t), seg.darea(t), seg.d2area(t)
        return phi(t) * (d2a / (4.0 * a) - 3.0 * da * da / (16.0 * a * a))

    background = LocalWarp(
        w=lambda t: seg.w(t) / phi(t) ** 2,
        dw=lambda t: seg.dw(t) / phi(t) ** 2 - 2.0 * seg.w(t) * dphi(t) / phi(t) ** 3,
        area=lambda t: FOUR_PI,
        darea=lambda t: 0.0,
        t_max=t_max,
    )
    return background, RadialFunction.smooth(phi, dphi, d2phi)


# ---------------------------------------------------------------------------
# composition


def _probe_ts(p: RadialProfile, n=60):
    ts = []
    for i, seg in enumerate(p.segments):
        hi = seg.end if math.isfinite(seg.end) else seg.start + 100.0 * (1.0 + seg.start)
        if i == 0:
            ts.extend(np.geomspace(1e-6 * hi, hi, n)[:-1])
        else:
            ts.extend(np.linspace(seg.start, hi, n)[1:-1])
    return [float(t) for t in ts]


def _composed_segment(seg: Segment, u: RadialFunction) -> Segment:
    end = seg.end

    def side(t):
        return "left" if t >= end else "right"

    def uu(t):
        s = side(t)
        return u.value(t, s), u.d1(t, s)

    def lapse(t):
        return seg.w(t) * u.value(t, side(t)) ** 2

    def dlapse(t):
        v, dv = uu(t)
        return seg.dw(t) * v * v + 2.0 * seg.w(t) * v * dv

    def area(t):
        return seg.area(t) * u.value(t, side(t)) ** 4

    def darea(t):
        v, dv = uu(t)
        return seg.darea(t) * v**4 + 4.0 * seg.area(t) * v**3 * dv

    def d2area(t):
        v, dv = uu(t)
        d2v = u.d2(t, side(t))
        a, da, d2a = seg.area(t), seg.darea(t), seg.d2area(t)
        return d2a * v**4 + 8.0 * da * v**3 * dv + 4.0 * a * (3.0 * v * v * dv * dv + v**3 * d2v)

    return Segment(seg.start, seg.end, area, darea, d2area, lapse=lapse, dlapse=dlapse,
                   label=seg.label)


def compose(cp: ConformalPair, name: str = "") -> RadialProfile:
    """Profile of ``u^4 g1``: lapse ``w u^2`` and area ``A u^4``."""
    bg, u = cp.background, cp.factor
    for t in _probe_ts(bg):
        if not u.value(t) > 0:
            raise FactorVanishesInterior(f"factor is {u.value(t)!r} at t = {t:.6g}")
    u0 = u.value(0.0)
    if bg.inner_area > 0 and abs(u0) <= 1e-14:
        if not u.d1(0.0) > 0:
            raise FactorVanishesInterior("factor vanishes at the boundary without positive slope")
        exponent = 4.0 / 3.0
    else:
        exponent = bg.origin_exponent
    tail = Tail("asymptotic")
    if cp.tail_coefficient is not None and bg.tail.kind in ("flat", "schwarzschild"):
        m = bg.tail.mass + 2.0 * cp.tail_coefficient
        tail = Tail("flat") if m == 0 else Tail("schwarzschild", m)
    segs = tuple(_composed_segment(seg, u) for seg in bg.segments)
    return RadialProfile(segs, tail, exponent, name or f"conformal({bg.name})")


# ---------------------------------------------------------------------------
# Laplacian identity


def _arclength_neighbours(w, t0, h):
    """Native points at arclength ``-h`` and ``+h`` from ``t0``."""
    def offset(t):
        if t == t0:
            return 0.0
        lo, hi = (t0, t) if t > t0 else (t, t0)
        v = integrate(Quadrant(w, lo, hi), 1e-13)
        return v if t > t0 else -v

    out = []
    for sgn in (-1.0, 1.0):
        step = h / w(t0)
        far = t0 + sgn * step
        while sgn * offset(far) < h:
            step *= 2.0
            far = t0 + sgn * step
        lo, hi = sorted((t0, far))
        out.append(brentq(lambda t: offset(t) - sgn * h, lo, hi, xtol=1e-15, rtol=1e-15))
    return out


def _fd_laplacian(w, area, darea, f, t0, h):
    tm, tp = _arclength_neighbours(w, t0, h)
    fm, f0, fp = f(tm), f(t0), f(tp)
    fs = (fp - fm) / (2.0 * h)
    fss = (fp - 2.0 * f0 + fm) / (h * h)
    return fss + darea(t0) / (w(t0) * area(t0)) * fs


def conformal_laplacian_residual(cp: ConformalPair, phi: RadialFunction, r: float, h: float) -> float:
    """``Delta_1(u phi) - u^5 Delta_2(phi) - phi Delta_1(u)`` at background arclength ``r``.

    Each Laplacian uses central differences of step ``h`` in its own metric's arclength.
    """
    bg, u = cp.background, cp.factor
    t0 = bg.t_at(r)
    seg = bg.segment_at(t0)
    w1, a1, da1 = seg.w, seg.area, seg.darea

    def w2(t):
        return seg.w(t) * u.value(t) ** 2

    def a2(t):
        return seg.area(t) * u.value(t) ** 4

    def da2(t):
        v = u.value(t)
        return seg.darea(t) * v**4 + 4.0 * seg.area(t) * v**3 * u.d1(t)

    lap_uphi = _fd_laplacian(w1, a1, da1, lambda t: u.value(t) * phi.value(t), t0, h)
    lap2_phi = _fd_laplacian(w2, a2, da2, phi.value, t0, h)
    lap_u = _fd_laplacian(w1, a1, da1, u.value, t0, h)
    u0 = u.value(t0)
    return lap_uphi - u0**5 * lap2_phi - phi.value(t0) * lap_u


def radial_laplacian(p, f: RadialFunction, t: float, side: str = "right") -> float:
    """Analytic radial Laplacian ``(f_tt + (A_t/A - w_t/w) f_t)/w^2``."""
    w, dw = p.lapse_t(t, side), p.dlapse_t(t, side)
    a, da = p.area_t(t, side), p.darea_t(t, side)
    return (f.d2(t, side) + (da / a - dw / w) * f.d1(t, side)) / (w * w)


def conformal_scalar_curvature(u: float, lap_u: float, R1: float) -> float:
    """``R2 = u^-5 (-8 Delta_1 u + R1 u)``."""
    if not u > 0:
        raise DomainError(f"conformal factor must be positive, got {u!r}")
    return (-8.0 * lap_u + R1 * u) / u**5


def conformal_mean_curvature(u: float, nu_u: float, H1: float) -> float:
    """``H2 = u^-2 H1 + 4 u^-3 nu_1(u)``."""
    if not u > 0:
        raise DomainError(f"conformal factor must be positive, got {u!r}")
    return H1 / (u * u) + 4.0 * nu_u / u**3


def adm_mass_shift(cp: ConformalPair) -> float:
    """``m1 - m2 = -2c`` for a factor ``u = 1 + c/r + O(r^-2)``."""
    if cp.tail_coefficient is not None:
        return -2.0 * cp.tail_coefficient
    bg, u = cp.background, cp.factor

    def scaled(x):
        t = 1.0 / x
        return math.sqrt(bg.area_t(t) / FOUR_PI) * (u.value(t) - 1.0)

    t0 = max(10.0, 2.0 * bg.segments[-1].start)
    try:
        probe = probe_limit(scaled, start=1.0 / t0)
    except (Oscillatory, ZasError) as exc:
        raise NoExpansion(f"r (u - 1) does not settle: {exc}") from exc
    if probe.diverged:
        raise NoExpansion("r (u - 1) diverges")
    return -2.0 * probe.extrapolant


# ---------------------------------------------------------------------------
# harmonic resolutions


@dataclass(frozen=True)
class HarmonicResolution:
    harmonically_regular: bool
    log_slope: float
    boundary_values: tuple
    basis_slopes: tuple


def _check_resolution(bg, phibar, t_max):
    if not phibar.value(0.0) == 0.0 and abs(phibar.value(0.0)) > 1e-12:
        raise ResolutionInvalid("resolution function must vanish on the boundary")
    for t in np.geomspace(1e-6 * t_max, t_max, 50):
        if not phibar.value(float(t)) > 0:
            raise ResolutionInvalid(f"resolution function not positive at t = {t:.6g}")
    d = [phibar.d1(t) / bg.lapse_t(t) for t in (1e-10 * t_max, 1e-14 * t_max)]
    if not all(math.isfinite(x) and x > 0 for x in d) or abs(math.log(d[0] / d[1])) > 0.5:
        raise ResolutionInvalid(f"normal derivative of the resolution function is not finite positive: {d}")


def harmonic_resolution_test(background, phibar: RadialFunction, t_max: Optional[float] = None,
                             rtol: float = 1e-10) -> HarmonicResolution:
    """Decide whether ``g = phibar^4 gbar`` admits a harmonic resolution near ``t = 0``.

    Solves ``Delta_bar u - f u = 0`` with ``f = Delta_bar(phibar)/phibar`` inward
    for two independent data and fits ``du/dsbar = kappa ln(sbar) + beta`` over the
    window; a logarithmically divergent slope on every branch with ``u(0) > 0``
    means the only harmonic candidates fail to be smooth.
    """
    if t_max is None:
        t_max = getattr(background, "t_max", None)
        if t_max is None:
            first = background.segments[0]
            t_max = first.end if math.isfinite(first.end) else 1.0
    _check_resolution(background, phibar, t_max)
    bg = background

    def p(t):
        return bg.darea_t(t) / bg.area_t(t) - bg.dlapse_t(t) / bg.lapse_t(t)

    def f(t):
        return (phibar.d2(t) + p(t) * phibar.d1(t)) / (bg.lapse_t(t) ** 2 * phibar.value(t))

    def q(t):
        return -bg.lapse_t(t) ** 2 * f(t)

    r_min = 1e-8 * t_max
    while bg.arclength_t(r_min) > 0.9 * FIT_WINDOW[0]:
        r_min *= 1e-3
        if r_min < 1e-300:
            raise ResolutionInvalid("cannot reach the fit window")
    r1 = 0.5 * t_max
    sols = [solve_radial_ode(p, q, r1, 1.0, 0.0, r_min=r_min, rtol=rtol, n_samples=801),
            solve_radial_ode(p, q, r1, 0.0, 1.0, r_min=r_min, rtol=rtol, n_samples=801)]
    sbar = np.array([bg.arclength_t(float(t)) for t in sols[0].r])
    mask = (sbar >= FIT_WINDOW[0]) & (sbar <= FIT_WINDOW[1])
    if mask.sum() < 8:
        raise ResolutionInvalid("too few samples in the fit window")
    x = np.log(sbar[mask])
    slopes, ends = [], []
    for sol in sols:
        dus = np.array([du / bg.lapse_t(float(t)) for t, du in zip(sol.r, sol.du)])
        kappa, _ = np.polyfit(x, dus[mask], 1)
        slopes.append(float(kappa))
        ends.append(float(sol.end_value))
    (k1, k2), (e1, e2) = slopes, ends
    norm2 = e1 * e1 + e2 * e2
    # the combination (e1, e2) maximises u(0); its orthogonal direction has u(0) = 0
    kappa_star = (e1 * k1 + e2 * k2) / norm2
    null = -e2 * k1 + e1 * k2
    if abs(null) > LOG_SLOPE_GATE * math.sqrt(norm2):
        kappa_star = 0.0  # adding the null branch cancels the log term while keeping u(0) > 0
    return HarmonicResolution(abs(kappa_star) <= LOG_SLOPE_GATE, kappa_star, (e1, e2), (k1, k2))


# ---------------------------------------------------------------------------
# minimal boundary factor


@dataclass(frozen=True)
class BoundaryFactor:
    ratio: float
    first_zero: Optional[float]


def min_boundary_conformal_factor(p: RadialProfile, probe_end: Optional[float] = None) -> BoundaryFactor:
    """Harmonic ``u`` making the inner boundary minimal in ``u^4 g``, normalised by ``u(0) = 1``.

    ``A u'`` is constant, so ``u(s) = 1 + u'(0) A(0) int_0^s ds/A`` with
    ``u'(0) = -H1/4``.
    """
    a0, da0, _ = p.area_s_derivs_t(0.0)
    h1 = da0 / a0
    if not (math.isfinite(h1) and h1 > 0):
        raise DomainError(f"boundary mean curvature must be finite and positive, got {h1!r}")
    ratio = -h1 / 4.0
    if probe_end is None:
        first = p.segments[0]
        probe_end = p.arclength_t(first.end) if math.isfinite(first.end) else 10.0
    target = 4.0 / da0  # u vanishes where int_0^s ds/A reaches this

    def inv_area(s):
        return 1.0 / p.area_t(p.t_at(s))

    def cumulative(s):
        return integrate(Quadrant(inv_area, 0.0, s), 1e-12) if s > 0 else 0.0

    grid = np.linspace(0.0, probe_end, 257)
    vals = [0.0]
    for a, b in zip(grid[:-1], grid[1:]):
        vals.append(vals[-1] + integrate(Quadrant(inv_area, float(a), float(b)), 1e-12))
        if vals[-1] >= target:
            s = brentq(lambda x: cumulative(x) - target, float(a), float(b), xtol=1e-14)
            return BoundaryFactor(ratio, s)
    return BoundaryFactor(ratio, None)
