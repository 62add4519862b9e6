"""Numerical primitives: quadrature, divergence tests, one-sided limits, radial ODEs.

Everything here is a pure function of its arguments.  Quadrature is backed by
``scipy.integrate.quad`` after problem-specific substitutions; the ODE
integrator is ``scipy.integrate.solve_ivp`` (DOP853).
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as _spi

from .errors import (
    AmbiguousExponent,
    NonIntegrable,
    Oscillatory,
    StepUnderflow,
    ToleranceNotMet,
)

QUAD_RTOL = 1e-10
LIMIT_TOL = 1e-6
ODE_RTOL = 1e-10
DIVERGENCE_THRESHOLD = 1e8

Func = Callable[[float], float]


# ---------------------------------------------------------------------------
# exponents


def local_exponent(f: Func, at: float, side: str = "right", delta: float = 1e-4, n: int = 21) -> float:
    """Least-squares log-log slope of ``|f|`` near ``at`` over ``[delta/100, delta]``.

    ``side="right"`` probes ``f(at + x)``, ``"left"`` probes ``f(at - x)`` and
    ``"infinity"`` probes ``f(x)`` for ``x`` in ``[delta, 100*delta]``.
    """
    if side == "infinity":
        xs = np.geomspace(delta, 100.0 * delta, n)
        ys = np.array([abs(f(x)) for x in xs])
    else:
        xs = np.geomspace(delta / 100.0, delta, n)
        sign = 1.0 if side == "right" else -1.0
        ys = np.array([abs(f(at + sign * x)) for x in xs])
    if np.any(ys <= 0) or not np.all(np.isfinite(ys)):
        raise AmbiguousExponent(f"integrand not log-evaluable near {at} ({side})")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


@dataclass(frozen=True)
class Quadrant:
    """A one-dimensional integral over ``[lower, upper]``; ``upper`` may be ``inf``.

    ``endpoint_exponents`` optionally declares the power-law behaviour of the
    integrand at each end: ``f(lower + x) ~ x**e0`` and ``f(upper - x) ~ x**e1``
    (for an infinite upper limit, ``f(t) ~ t**e1`` as ``t -> inf``).
    Declarations are checked against the local log-log slope on construction.
    """

    integrand: Func
    lower: float
    upper: float
    endpoint_exponents: Optional[tuple] = None

    def __post_init__(self):
        if not (self.lower < self.upper) or math.isnan(self.lower):
            raise ValueError(f"need lower < upper, got [{self.lower}, {self.upper}]")
        if math.isinf(self.lower):
            raise ValueError("lower limit must be finite")
        if self.endpoint_exponents is None:
            return
        if len(self.endpoint_exponents) != 2:
            raise ValueError("endpoint_exponents must be a pair")
        e0, e1 = self.endpoint_exponents
        width = self.upper - self.lower
        if e0 is not None:
            delta = min(1e-4, 1e-3 * width)
            self._check(e0, local_exponent(self.integrand, self.lower, "right", delta))
        if e1 is not None:
            if math.isinf(self.upper):
                start = 1e4 * max(1.0, abs(self.lower))
                self._check(e1, local_exponent(self.integrand, self.upper, "infinity", start))
            else:
                delta = min(1e-4, 1e-3 * width)
                self._check(e1, local_exponent(self.integrand, self.upper, "left", delta))

    @staticmethod
    def _check(declared, measured):
        if abs(measured - declared) > 0.05 * max(abs(declared), 1.0):
            raise ValueError(
                f"declared endpoint exponent {declared} does not match measured slope {measured:.4f}"
            )

    @property
    def lower_exponent(self):
        return None if self.endpoint_exponents is None else self.endpoint_exponents[0]

    @property
    def upper_exponent(self):
        return None if self.endpoint_exponents is None else self.endpoint_exponents[1]


def _quad(f, a, b, rel_tol, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", _spi.IntegrationWarning)
        try:
            val, err = _spi.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=1000, points=points)
        except _spi.IntegrationWarning as exc:
            # quad cannot always certify tiny relative errors; accept when the
            # returned error estimate is still within a factor of the target
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                val, err = _spi.quad(f, a, b, epsabs=0.0, epsrel=rel_tol, limit=1000, points=points)
            if not (err <= 100 * rel_tol * abs(val) or err < 1e-300):
                raise ToleranceNotMet(f"adaptive quadrature stalled on [{a}, {b}]: {exc}") from exc
    if not math.isfinite(val):
        raise ToleranceNotMet(f"non-finite quadrature result on [{a}, {b}]")
    return val


def _integrate_finite(f, a, b, e0, e1, rel_tol):
    if e0 is not None and e0 <= -1:
        raise NonIntegrable(f"endpoint exponent {e0} <= -1 at {a}")
    if e1 is not None and e1 <= -1:
        raise NonIntegrable(f"endpoint exponent {e1} <= -1 at {b}")
    sing0 = e0 is not None and e0 != 0
    sing1 = e1 is not None and e1 != 0
    if sing0 and sing1:
        mid = 0.5 * (a + b)
        return _integrate_finite(f, a, mid, e0, None, rel_tol) + _integrate_finite(f, mid, b, None, e1, rel_tol)
    if sing0:
        # t = a + u**k flattens x**e0 into u**0
        k = 1.0 / (1.0 + e0)
        return _quad(lambda u: f(a + u**k) * k * u ** (k - 1.0), 0.0, (b - a) ** (1.0 / k), rel_tol)
    if sing1:
        k = 1.0 / (1.0 + e1)
        return _quad(lambda u: f(b - u**k) * k * u ** (k - 1.0), 0.0, (b - a) ** (1.0 / k), rel_tol)
    if a > 0 and b / a > 1e3:
        # many decades above a point at the origin: integrate in log t
        ya, yb = math.log(a), math.log(b)
        return _quad(lambda y: f(math.exp(y)) * math.exp(y), ya, yb, rel_tol)
    return _quad(f, a, b, rel_tol)


def integrate(q: Quadrant, rel_tol: float = QUAD_RTOL) -> float:
    """Integral of ``q`` to relative accuracy ``rel_tol``.

    Integrable endpoint singularities are removed by a power substitution;
    an infinite upper limit is mapped to a finite one with ``t -> 1/t``.
    """
    if not (0.0 < rel_tol <= 1e-3):
        raise ValueError(f"rel_tol must lie in (0, 1e-3], got {rel_tol}")
    f, a, b = q.integrand, q.lower, q.upper
    e0, e1 = q.lower_exponent, q.upper_exponent
    if not math.isinf(b):
        return _integrate_finite(f, a, b, e0, e1, rel_tol)
    if e1 is not None and e1 >= -1:
        raise NonIntegrable(f"integrand decays like t**{e1}; tail diverges")
    split = max(1.0, 2.0 * abs(a)) if a < 1.0 else 2.0 * a
    head = _integrate_finite(f, a, split, e0, None, rel_tol)
    tail = _quad(lambda x: f(1.0 / x) / (x * x), 0.0, 1.0 / split, rel_tol)
    return head + tail


class Divergence(str, enum.Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"


def classify_divergence(q: Quadrant, delta: Optional[float] = None) -> Divergence:
    """Does the integral of ``q`` diverge at its lower endpoint?

    A declared lower exponent always wins; otherwise the exponent is
    estimated by regression over ``[delta/100, delta]`` and an estimate
    within 0.01 of -1 is refused.
    """
    e = q.lower_exponent
    if e is None:
        if delta is None:
            delta = min(1e-4, 1e-3 * (q.upper - q.lower))
        e = local_exponent(q.integrand, q.lower, "right", delta)
        if abs(e + 1.0) <= 0.01:
            raise AmbiguousExponent(f"estimated exponent {e:.5f} too close to -1")
    return Divergence.DIVERGENT if e <= -1.0 else Divergence.CONVERGENT


# ---------------------------------------------------------------------------
# one-sided limits


def _shanks_table(seq: Sequence[float], depth: int) -> list:
    """Even columns of Wynn's epsilon table (column 0 is ``seq`` itself)."""
    cols = [list(seq)]
    prev = [0.0] * (len(seq) + 1)
    cur = list(seq)
    scale = max(abs(x) for x in seq) or 1.0
    for k in range(1, 2 * depth + 1):
        nxt = []
        for i in range(len(cur) - 1):
            d = cur[i + 1] - cur[i]
            if abs(d) <= 1e-15 * scale:
                nxt = []
                break
            nxt.append(prev[i + 1] + 1.0 / d)
        if len(nxt) == 0:
            break
        prev, cur = cur, nxt
        if k % 2 == 0:
            cols.append(list(cur))
    return cols


def _extrapolate(values: Sequence[float]) -> float:
    window = list(values[-10:])
    cols = _shanks_table(window, depth=4)
    # deepest column still supported by two entries, so its last two entries
    # can be compared; fall back to shallower columns otherwise
    for col in reversed(cols):
        if len(col) >= 2:
            return col[-1]
    return window[-1]


def _increments_shrink(window: Sequence[float], tol: float) -> bool:
    d = [abs(b - a) for a, b in zip(window, window[1:])]
    floor = 1e-3 * tol * max(1.0, max(abs(x) for x in window))
    return all(b < a or b <= floor for a, b in zip(d, d[1:]))


@dataclass(frozen=True)
class LimitProbe:
    """Record of a one-sided limit evaluation at 0+."""

    sample_points: tuple
    values: tuple
    extrapolant: float
    diverged: bool = False
    estimates: tuple = field(default=(), repr=False)


def probe_limit(
    f: Func,
    start: float = 1e-2,
    tol: float = LIMIT_TOL,
    min_samples: int = 6,
    max_samples: int = 1000,
    threshold: float = DIVERGENCE_THRESHOLD,
) -> LimitProbe:
    """Evaluate ``lim_{x->0+} f(x)`` from samples at ``start * 2**-k``.

    Samples are accelerated with Wynn's epsilon algorithm.  Convergence is
    declared when three successive extrapolants agree within
    ``tol * max(1, |value|)``; divergence to -inf (+inf) when the samples pass
    ``-threshold`` (``+threshold``) while moving monotonically over the last
    ``min_samples`` probes.
    """
    if min_samples < 6:
        raise ValueError("at least 6 samples are required")
    xs, vs, est = [], [], []
    for k in range(max_samples):
        x = start * 2.0**-k
        if x == 0.0:
            break
        v = float(f(x))
        if math.isnan(v):
            raise Oscillatory(f"limit probe produced NaN at x={x}")
        xs.append(x)
        vs.append(v)
        if math.isinf(v):
            recent = vs[-min_samples:]
            if len(recent) == min_samples and all(b <= a for a, b in zip(recent, recent[1:])) and v < 0:
                return LimitProbe(tuple(xs), tuple(vs), -math.inf, True, tuple(est))
            if len(recent) == min_samples and all(b >= a for a, b in zip(recent, recent[1:])) and v > 0:
                return LimitProbe(tuple(xs), tuple(vs), math.inf, True, tuple(est))
            raise Oscillatory(f"limit probe produced inf at x={x}")
        if len(vs) < min_samples:
            continue
        recent = vs[-min_samples:]
        if v < -threshold and all(b < a for a, b in zip(recent, recent[1:])):
            return LimitProbe(tuple(xs), tuple(vs), -math.inf, True, tuple(est))
        if v > threshold and all(b > a for a, b in zip(recent, recent[1:])):
            return LimitProbe(tuple(xs), tuple(vs), math.inf, True, tuple(est))
        est.append(_extrapolate(vs))
        # Shanks transforms map a divergent power sequence to its anti-limit,
        # so convergence also requires the raw increments to be shrinking
        if len(est) >= 3 and _increments_shrink(vs[-5:], tol):
            e2, e1, e0 = est[-3], est[-2], est[-1]
            gate = tol * max(1.0, abs(e0))
            if abs(e0 - e1) <= gate and abs(e1 - e2) <= gate and abs(e0 - v) <= 1e3 * max(1.0, abs(e0)):
                return LimitProbe(tuple(xs), tuple(vs), e0, False, tuple(est))
    raise Oscillatory(
        f"no convergence or monotone divergence after {len(vs)} samples (last value {vs[-1]!r})"
    )


def limit_at_zero(f: Func, **kwargs) -> float:
    """Extended-real one-sided limit of ``f`` at 0+; see :func:`probe_limit`."""
    return probe_limit(f, **kwargs).extrapolant


# ---------------------------------------------------------------------------
# radial ODEs


@dataclass(frozen=True)
class RadialSolution:
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray

    @property
    def end_value(self) -> float:
        return float(self.u[-1])

    @property
    def end_slope(self) -> float:
        return float(self.du[-1])


def solve_radial_ode(
    p: Func,
    q: Func,
    r1: float,
    value: float,
    slope: float,
    *,
    direction: str = "inward",
    r_end: Optional[float] = None,
    r_min: float = 1e-8,
    rtol: float = ODE_RTOL,
    n_samples: int = 401,
) -> RadialSolution:
    """Integrate ``u'' + p(r) u' + q(r) u = 0`` from ``r1`` with ``u(r1)=value``, ``u'(r1)=slope``.

    Inward integration runs in ``y = ln r`` down to ``r_end`` (default
    ``r_min``), which keeps coefficients like ``1/r`` benign.  Outward
    integration runs in ``r`` up to ``r_end`` and may start at ``r1 = 0``.
    Samples are returned ordered along the direction of integration.
    """
    if direction not in ("inward", "outward"):
        raise ValueError(f"direction must be 'inward' or 'outward', got {direction!r}")
    if direction == "inward":
        if r1 <= 0:
            raise ValueError("inward integration needs r1 > 0")
        end = r_min if r_end is None else r_end
        if not (0 < end < r1):
            raise ValueError(f"inward end point must lie in (0, {r1})")

        def rhs(y, z):
            r = math.exp(y)
            u, v = z  # v = du/dy = r u'
            return [v, v - r * p(r) * v - r * r * q(r) * u]

        y0, y1 = math.log(r1), math.log(end)
        ys = np.linspace(y0, y1, n_samples)
        sol = _spi.solve_ivp(rhs, (y0, y1), [value, r1 * slope], method="DOP853",
                             rtol=rtol, atol=rtol * 1e-4, t_eval=ys)
        if sol.status != 0:
            raise StepUnderflow(f"inward integration failed: {sol.message}")
        r = np.exp(sol.t)
        return RadialSolution(r, sol.y[0], sol.y[1] / r)

    if r_end is None or r_end <= r1 or r1 < 0:
        raise ValueError("outward integration needs 0 <= r1 < r_end")

    def rhs_lin(r, z):
        u, v = z
        return [v, -p(r) * v - q(r) * u]

    rs = np.linspace(r1, r_end, n_samples)
    sol = _spi.solve_ivp(rhs_lin, (r1, r_end), [value, slope], method="DOP853",
                         rtol=rtol, atol=rtol * 1e-4, t_eval=rs)
    if sol.status != 0:
        raise StepUnderflow(f"outward integration failed: {sol.message}")
    return RadialSolution(sol.t, sol.y[0], sol.y[1])
