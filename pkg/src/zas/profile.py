"""Spherically symmetric metrics ``ds^2 = w(t)^2 dt^2 + (A(t)/4pi) dsigma^2``.

A :class:`RadialProfile` is an ordered list of :class:`Segment` pieces on a
coordinate ``t`` whose inner boundary sits at ``t = 0``; the last segment runs
to infinity and carries the asymptotic tail.  Arclength is
``s(t) = int_0^t w``.  All public geometry takes arclength arguments; the
``*_t`` helpers work in the native coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import ValidationError
from .numeric import QUAD_RTOL, Quadrant, integrate

FOUR_PI = 4.0 * math.pi

Func = Callable[[float], float]


def _one(t):
    return 1.0


def _zero(t):
    return 0.0


@dataclass(frozen=True)
class Segment:
    """One smooth piece of a profile on ``[start, end]`` (``end`` may be ``inf``).

    ``tail_integral(t)``, when given, is the closed form of
    ``int_t^end w/A`` and replaces quadrature on this piece.
    """

    start: float
    end: float
    area: Func
    darea: Func
    d2area: Func
    lapse: Optional[Func] = None
    dlapse: Optional[Func] = None
    tail_integral: Optional[Func] = None
    label: str = ""

    @property
    def unit_lapse(self) -> bool:
        return self.lapse is None

    def w(self, t):
        return 1.0 if self.lapse is None else self.lapse(t)

    def dw(self, t):
        return 0.0 if self.dlapse is None else self.dlapse(t)


@dataclass(frozen=True)
class Tail:
    """Asymptotic form of the outermost segment.

    ``flat`` and ``schwarzschild`` tails carry an exact mass; ``asymptotic``
    tails (e.g. produced by conformal composition) only promise asymptotic
    flatness, and their mass is evaluated numerically.
    """

    kind: str
    mass: float = 0.0

    def __post_init__(self):
        if self.kind not in ("flat", "schwarzschild", "asymptotic"):
            raise ValidationError("tail_declared", f"unknown tail kind {self.kind!r}")
        if self.kind == "flat" and self.mass != 0.0:
            raise ValidationError("tail_declared", "flat tail must have zero mass")


# ---------------------------------------------------------------------------
# segment constructors


def power_segment(start, end, alpha, coeff=1.0, label="power"):
    """``A(t) = 4 pi c t**alpha`` with unit lapse."""
    c = FOUR_PI * coeff
    return Segment(
        start, end,
        lambda t: c * t**alpha,
        lambda t: c * alpha * t ** (alpha - 1.0),
        lambda t: c * alpha * (alpha - 1.0) * t ** (alpha - 2.0),
        label=label,
    )


def cylinder_segment(start, end, area, label="cylinder"):
    return Segment(start, end, lambda t: area, _zero, _zero, label=label)


def hermite_segment(start, end, a0, da0, a1, da1, label="blend"):
    """Cubic Hermite blend of ``A`` matching values and slopes at both ends."""
    h = end - start

    def basis(t):
        x = (t - start) / h
        return x, (2 * x**3 - 3 * x**2 + 1, x**3 - 2 * x**2 + x, -2 * x**3 + 3 * x**2, x**3 - x**2)

    def area(t):
        _, (h00, h10, h01, h11) = basis(t)
        return h00 * a0 + h10 * h * da0 + h01 * a1 + h11 * h * da1

    def darea(t):
        x, _ = basis(t)
        d00, d10, d01, d11 = 6 * x**2 - 6 * x, 3 * x**2 - 4 * x + 1, -6 * x**2 + 6 * x, 3 * x**2 - 2 * x
        return (d00 * a0 + d10 * h * da0 + d01 * a1 + d11 * h * da1) / h

    def d2area(t):
        x, _ = basis(t)
        s00, s10, s01, s11 = 12 * x - 6, 6 * x - 4, -12 * x + 6, 6 * x - 2
        return (s00 * a0 + s10 * h * da0 + s01 * a1 + s11 * h * da1) / h**2

    return Segment(start, end, area, darea, d2area, label=label)


def isotropic_segment(start, end, m, offset, label="schwarzschild"):
    """Schwarzschild metric ``(1 + m/2r)^4 (dr^2 + r^2 dsigma^2)`` with ``r = t + offset``.

    The conformal factor is evaluated as ``(t + offset + m/2)/r`` so that a
    negative-mass horizon at ``offset = -m/2`` vanishes exactly at ``t = 0``.
    """
    shift = offset + 0.5 * m

    def psi(t):
        return (t + shift) / (t + offset)

    def dpsi(t):
        r = t + offset
        return -0.5 * m / (r * r)

    def d2psi(t):
        r = t + offset
        return m / (r * r * r)

    def areal(t):
        return (t + offset) * psi(t) ** 2

    def dareal(t):
        r, p = t + offset, psi(t)
        return p * p + 2 * r * p * dpsi(t)

    def d2areal(t):
        r, p, dp = t + offset, psi(t), dpsi(t)
        return 4 * p * dp + 2 * r * dp * dp + 2 * r * p * d2psi(t)

    def tail_integral(t):
        return 1.0 / (FOUR_PI * (t + shift))

    return Segment(
        start, end,
        lambda t: FOUR_PI * areal(t) ** 2,
        lambda t: 2 * FOUR_PI * areal(t) * dareal(t),
        lambda t: 2 * FOUR_PI * (dareal(t) ** 2 + areal(t) * d2areal(t)),
        lapse=lambda t: psi(t) ** 2,
        dlapse=lambda t: 2 * psi(t) * dpsi(t),
        tail_integral=tail_integral if math.isinf(end) else None,
        label=label,
    )


def flat_segment(start, end, offset=0.0, label="flat"):
    """``A = 4 pi (t + offset)^2`` with unit lapse."""
    tail = (lambda t: 1.0 / (FOUR_PI * (t + offset))) if math.isinf(end) else None
    return Segment(
        start, end,
        lambda t: FOUR_PI * (t + offset) ** 2,
        lambda t: 2 * FOUR_PI * (t + offset),
        lambda t: 2 * FOUR_PI,
        tail_integral=tail,
        label=label,
    )


# ---------------------------------------------------------------------------
# profile


_PROBE_T = 1e6


@dataclass(frozen=True)
class RadialProfile:
    segments: tuple
    tail: Tail
    origin_exponent: Optional[float] = None
    name: str = ""
    _s_starts: tuple = field(default=(), init=False, repr=False, compare=False)
    _c1_joins: bool = field(default=True, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        self._validate()

    # -- validation ---------------------------------------------------------

    def _validate(self):
        segs = self.segments
        if not segs:
            raise ValidationError("segments_nonempty")
        if self.tail is None or not isinstance(self.tail, Tail):
            raise ValidationError("tail_declared", "profile needs a flat or schwarzschild tail")
        if segs[0].start != 0.0:
            raise ValidationError("segments_contiguous", "inner boundary must sit at t = 0")
        for a, b in zip(segs, segs[1:]):
            if not (a.start < a.end < math.inf) or a.end != b.start:
                raise ValidationError("segments_contiguous", f"gap or overlap at t = {a.end}")
        if not math.isinf(segs[-1].end) or segs[-1].start >= segs[-1].end:
            raise ValidationError("segments_contiguous", "last segment must extend to infinity")

        for i, seg in enumerate(segs):
            hi = seg.end if math.isfinite(seg.end) else seg.start + 10.0 * (1.0 + seg.start)
            if i == 0:
                ts = np.geomspace(max(hi, 1e-300) * 1e-9, hi, 64)[:-1]
            else:
                ts = np.linspace(seg.start, hi, 66)[1:-1]
            for t in ts:
                a = seg.area(t)
                if not (a > 0 and math.isfinite(a)):
                    raise ValidationError("area_positive", f"A({t:.6g}) = {a!r} in segment {i}")
                w = seg.w(t)
                if not (w > 0 and math.isfinite(w)):
                    raise ValidationError("arclength_increasing", f"w({t:.6g}) = {w!r} in segment {i}")

        c1 = True
        for i, (a, b) in enumerate(zip(segs, segs[1:])):
            t = a.end
            al, ar = a.area(t), b.area(t)
            if abs(al - ar) > 1e-9 * max(abs(al), abs(ar)):
                raise ValidationError("area_continuous", f"A jumps from {al} to {ar} at t = {t}")
            sl, sr = a.darea(t) / a.w(t), b.darea(t) / b.w(t)
            if abs(sl - sr) > 1e-7 * max(1.0, abs(sl), abs(sr)):
                c1 = False
        object.__setattr__(self, "_c1_joins", c1)

        starts = [0.0]
        for seg in segs[:-1]:
            starts.append(starts[-1] + self._segment_arclength(seg, seg.start, seg.end))
        object.__setattr__(self, "_s_starts", tuple(starts))

        t_far = max(_PROBE_T, 1e3 * segs[-1].start)
        ratio = self.area_t(t_far) / (FOUR_PI * self.arclength_t(t_far) ** 2)
        if abs(ratio - 1.0) > 1e-3:
            raise ValidationError("tail_asymptotically_flat", f"A/(4 pi s^2) = {ratio:.6g} at t = {t_far:g}")

        if self.origin_exponent is not None:
            if self.inner_area > 0:
                raise ValidationError("origin_exponent", "declared for a boundary of positive area")
            p = self.origin_exponent
            measured = self.measured_origin_exponent()
            if abs(measured - p) > 0.05 * abs(p):
                raise ValidationError("origin_exponent", f"declared {p}, measured {measured:.4f}")

    # -- segment lookup -----------------------------------------------------

    def segment_index(self, t: float, side: str = "right") -> int:
        segs = self.segments
        if t < 0:
            raise ValueError(f"t = {t} lies inside the inner boundary")
        for i, seg in enumerate(segs):
            if t < seg.end or (side == "left" and t == seg.end):
                return i
        return len(segs) - 1

    def segment_at(self, t, side="right") -> Segment:
        return self.segments[self.segment_index(t, side)]

    @property
    def joins(self) -> tuple:
        return tuple(seg.end for seg in self.segments[:-1])

    @property
    def c1_joins(self) -> bool:
        return self._c1_joins

    # -- native-coordinate evaluation ----------------------------------------

    def area_t(self, t, side="right"):
        return self.segment_at(t, side).area(t)

    def darea_t(self, t, side="right"):
        return self.segment_at(t, side).darea(t)

    def d2area_t(self, t, side="right"):
        return self.segment_at(t, side).d2area(t)

    def lapse_t(self, t, side="right"):
        return self.segment_at(t, side).w(t)

    def dlapse_t(self, t, side="right"):
        return self.segment_at(t, side).dw(t)

    def area_s_derivs_t(self, t, side="right"):
        """``(A, dA/ds, d2A/ds2)`` at native ``t``."""
        seg = self.segment_at(t, side)
        w, dw = seg.w(t), seg.dw(t)
        a, da, d2a = seg.area(t), seg.darea(t), seg.d2area(t)
        return a, da / w, (d2a - da * dw / w) / (w * w)

    @property
    def inner_area(self) -> float:
        return self.segments[0].area(0.0)

    @property
    def is_zas(self) -> bool:
        return self.inner_area == 0.0

    @property
    def unit_lapse(self) -> bool:
        return all(seg.unit_lapse for seg in self.segments)

    # -- arclength ------------------------------------------------------------

    @staticmethod
    def _segment_arclength(seg, a, b):
        if b <= a:
            return 0.0
        if seg.unit_lapse:
            return b - a
        return integrate(Quadrant(seg.w, a, b), 1e-13)

    def arclength_t(self, t: float) -> float:
        i = self.segment_index(t)
        seg = self.segments[i]
        return self._s_starts[i] + self._segment_arclength(seg, seg.start, t)

    def t_at(self, s: float) -> float:
        """Native coordinate of the sphere at arclength ``s`` from the boundary."""
        if s < 0:
            raise ValueError(f"arclength {s} < 0")
        if s == 0:
            return 0.0
        i = 0
        for k, s0 in enumerate(self._s_starts):
            if s >= s0:
                i = k
        seg = self.segments[i]
        s0 = self._s_starts[i]
        if seg.unit_lapse:
            return seg.start + (s - s0)
        if i == 0:
            hi = seg.end if math.isfinite(seg.end) else 1.0
            while math.isinf(seg.end) and self.arclength_t(hi) < s:
                hi *= 2.0
            lo = hi
            while self.arclength_t(lo) >= s:
                lo *= 1e-3
                if lo < 1e-300:
                    return lo
            g = lambda y: math.log(self._segment_arclength(seg, 0.0, math.exp(y))) - math.log(s)
            return math.exp(brentq(g, math.log(lo), math.log(hi), xtol=1e-300, rtol=1e-15))
        lo = seg.start
        hi = seg.end if math.isfinite(seg.end) else seg.start + 2.0 * (s - s0) + 1.0
        while self.arclength_t(hi) < s:
            hi = seg.start + 2.0 * (hi - seg.start)
        g = lambda t: s0 + self._segment_arclength(seg, seg.start, t) - s
        return brentq(g, lo, hi, xtol=1e-300, rtol=1e-15)

    def measured_origin_exponent(self, delta: Optional[float] = None) -> float:
        """Log-log slope of ``A`` against arclength over ``[delta/100, delta]`` in ``t``."""
        first = self.segments[0]
        if delta is None:
            span = first.end if math.isfinite(first.end) else 1.0
            delta = 1e-4 * span
        ts = np.geomspace(delta / 100.0, delta, 21)
        ss = np.array([self._segment_arclength(first, 0.0, t) for t in ts])
        aa = np.array([first.area(t) for t in ts])
        slope, _ = np.polyfit(np.log(ss), np.log(aa), 1)
        return float(slope)

    # -- the capacity integral -------------------------------------------------

    def inverse_area_integral_t(self, t: float, rel_tol: float = QUAD_RTOL) -> float:
        """``int_t^inf w/A dt``, i.e. ``int_s^inf ds/A`` in arclength."""
        i = self.segment_index(t)
        total = 0.0
        for k in range(i, len(self.segments)):
            seg = self.segments[k]
            a = t if k == i else seg.start
            if seg.tail_integral is not None:
                total += seg.tail_integral(a)
                continue
            f = (lambda x, seg=seg: 1.0 / seg.area(x)) if seg.unit_lapse else (
                lambda x, seg=seg: seg.w(x) / seg.area(x))
            if a < seg.end:
                total += integrate(Quadrant(f, a, seg.end), rel_tol)
        return total


def profile_from_segments(segments: Sequence[Segment], tail: Tail, origin_exponent=None, name=""):
    return RadialProfile(tuple(segments), tail, origin_exponent, name)
