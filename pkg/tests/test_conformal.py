import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zas.conformal import (
    ConformalPair,
    RadialFunction,
    adm_mass_shift,
    canonical_resolution,
    compose,
    conformal_laplacian_residual,
    conformal_mean_curvature,
    conformal_scalar_curvature,
    constant_function,
    harmonic_resolution_test,
    min_boundary_conformal_factor,
    radial_laplacian,
)
from zas.errors import DomainError, FactorVanishesInterior, NoExpansion, ResolutionInvalid
from zas.geometry import adm_mass, classify_zas, scalar_curvature, zas_mass
from zas.models import ModelSpec, build, exp_warp, parse_model
from zas.profile import RadialProfile, Tail, flat_segment

FLAT1 = RadialProfile((flat_segment(0.0, math.inf, 1.0),), Tail("flat"), name="flat, r >= 1")


def inverse_radius_factor(c, offset=1.0):
    return RadialFunction.smooth(
        lambda t: 1 + c / (t + offset),
        lambda t: -c / (t + offset) ** 2,
        lambda t: 2 * c / (t + offset) ** 3,
    )


# -- compose -------------------------------------------------------------------


def test_identity_factor_gives_back_flat():
    flat = build(parse_model("flat")).profile
    g = compose(ConformalPair(flat, constant_function(1.0), 0.0))
    for rho in (0.1, 1.0, 5.0):
        assert g.area_t(rho) == flat.area_t(rho)
        assert g.lapse_t(rho) == 1.0
    assert adm_mass(g) == 0.0


def test_compose_schwarzschild_zas_from_flat():
    # u = 1 - 1/r on r >= 1: isotropic Schwarzschild with m = -2
    u = RadialFunction.smooth(lambda t: t / (t + 1), lambda t: 1 / (t + 1) ** 2, lambda t: -2 / (t + 1) ** 3)
    g = compose(ConformalPair(FLAT1, u, -1.0))
    assert g.is_zas
    assert g.origin_exponent == pytest.approx(4 / 3)
    assert g.measured_origin_exponent(1e-6) == pytest.approx(4 / 3, abs=1e-3)
    assert zas_mass(g).value == pytest.approx(-2.0, rel=1e-6)
    assert adm_mass(g) == -2.0


def test_compose_cylinder_adm_is_b():
    m = build(ModelSpec("schwarzschild_with_cylinder", {"mbar": 1.0, "L": 12.0}))
    assert adm_mass(m.profile) == pytest.approx(0.5, rel=1e-12)
    undeclared = compose(replace(m.resolution, tail_coefficient=None))
    assert adm_mass(undeclared) == pytest.approx(0.5, rel=1e-6)


def test_factor_vanishing_inside_is_rejected():
    u = RadialFunction.smooth(lambda t: t - 1.0, lambda t: 1.0, lambda t: 0.0)
    with pytest.raises(FactorVanishesInterior):
        compose(ConformalPair(FLAT1, u))


# -- Laplacian identity ----------------------------------------------------------


def test_residual_zero_for_unit_factor():
    phi = inverse_radius_factor(0.7)
    assert conformal_laplacian_residual(ConformalPair(FLAT1, constant_function(1.0)), phi, 0.5, 1e-2) == 0.0


def test_harmonic_transport_schwarzschild():
    u = inverse_radius_factor(0.5)
    phi = RadialFunction.smooth(lambda t: 1 / u.value(t), lambda t: 0.0, lambda t: 0.0)
    cp = ConformalPair(FLAT1, u)
    for r in (0.2, 1.0, 3.0):
        assert abs(conformal_laplacian_residual(cp, phi, r, 1e-3)) < 1e-6
        assert abs(radial_laplacian(FLAT1, u, r)) < 1e-12


def poly(c0, c1, c2, c3):
    return RadialFunction.smooth(
        lambda t: c0 + c1 * t + c2 * t * t + c3 * t**3,
        lambda t: c1 + 2 * c2 * t + 3 * c3 * t * t,
        lambda t: 2 * c2 + 6 * c3 * t,
    )


@given(
    st.tuples(st.floats(1.0, 2.0), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3)),
    st.tuples(st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.3, 1.0), st.floats(0.3, 1.0)),
    st.floats(0.2, 0.8),
)
def test_laplacian_identity_second_order(uc, pc, r):
    cp = ConformalPair(FLAT1, poly(*uc))
    phi = poly(*pc)
    r1 = conformal_laplacian_residual(cp, phi, r, 2e-2)
    r2 = conformal_laplacian_residual(cp, phi, r, 1e-2)
    if abs(r1) < 1e-9:
        return  # truncation error vanishes identically
    assert r1 / r2 == pytest.approx(4.0, abs=0.5)


# -- pointwise formulas --------------------------------------------------------


def test_scalar_curvature_formula_examples():
    assert conformal_scalar_curvature(1.0, 0.0, 5.0) == 5.0
    assert conformal_scalar_curvature(2.0, 0.0, 0.0) == 0.0
    assert conformal_scalar_curvature(1.0, -1.0, 0.0) == 8.0
    with pytest.raises(DomainError):
        conformal_scalar_curvature(0.0, 0.0, 1.0)


def test_mean_curvature_formula_examples():
    m = 1.7
    assert conformal_mean_curvature(2.0, -2 / m, 4 / m) == pytest.approx(0.0, abs=1e-15)
    assert conformal_mean_curvature(1.0, 0.0, 0.3) == 0.3
    # bump boundary, eps = 0.1, c2 = 1, c1 = -1/4 in the A/4pi normalisation
    assert conformal_mean_curvature(1.0, -0.25 / 1.1, 1 / 1.1) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(DomainError):
        conformal_mean_curvature(-1.0, 0.0, 1.0)


@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_constant_factor_rescales_mean_curvature(c, h1):
    assert conformal_mean_curvature(c, 0.0, h1) == pytest.approx(h1 / c**2, rel=1e-15)


@given(st.floats(0.1, 4.0), st.floats(0.01, 20.0))
def test_scalar_sign_preserved_for_harmonic_factor(m, t):
    u = inverse_radius_factor(0.5 * m)
    lap = radial_laplacian(FLAT1, u, t)
    assert abs(lap) < 1e-8
    assert conformal_scalar_curvature(u.value(t), lap, 0.0) >= -1e-6


def test_composed_curvature_matches_formula():
    u = inverse_radius_factor(0.5)
    g = compose(ConformalPair(FLAT1, u, 0.5))
    for t in (0.3, 2.0):
        direct = scalar_curvature(g, g.arclength_t(t))
        formula = conformal_scalar_curvature(u.value(t), radial_laplacian(FLAT1, u, t), 0.0)
        assert direct == pytest.approx(formula, abs=1e-10)


def test_horizon_minimal_under_schwarzschild_factor():
    m = 1.0
    u = inverse_radius_factor(0.5 * m, offset=0.0)
    r = m / 2
    h1 = 2 / r
    nu = u.d1(r)
    assert abs(conformal_mean_curvature(u.value(r), nu, h1)) < 1e-10


# -- ADM shift -------------------------------------------------------------------


def test_shift_examples():
    assert adm_mass_shift(ConformalPair(FLAT1, constant_function(1.0))) == pytest.approx(0.0, abs=1e-12)
    assert adm_mass_shift(ConformalPair(FLAT1, inverse_radius_factor(0.5))) == pytest.approx(-1.0, rel=1e-8)
    m = build(ModelSpec("schwarzschild_with_cylinder", {"mbar": 1.0, "L": 12.0}))
    fitted = replace(m.resolution, tail_coefficient=None)
    assert 1.0 - adm_mass_shift(fitted) == pytest.approx(0.5, rel=1e-6)


def test_no_expansion():
    u = RadialFunction.smooth(lambda t: 2.0 + math.sin(t), lambda t: math.cos(t), lambda t: -math.sin(t))
    with pytest.raises(NoExpansion):
        adm_mass_shift(ConformalPair(FLAT1, u))


@pytest.mark.parametrize("label", ["flat", "schwarzschild:m=1", "schwarzschild:m=-1",
                                   "schwarzschild_with_cylinder:mbar=1,L=4",
                                   "schwarzschild_with_cylinder:mbar=2,L=1"])
def test_composition_consistency(label):
    pair = build(parse_model(label)).resolution
    fitted = replace(pair, tail_coefficient=None)
    lhs = adm_mass(compose(fitted))
    rhs = adm_mass(pair.background) - adm_mass_shift(fitted)
    assert lhs == pytest.approx(rhs, abs=1e-6)


# -- harmonic resolutions ------------------------------------------------------


def test_exp_warp_not_harmonically_regular():
    res = harmonic_resolution_test(*exp_warp())
    assert not res.harmonically_regular
    assert res.log_slope == pytest.approx(1.0, abs=1e-3)


def test_four_thirds_cylinder_resolution_is_harmonic():
    p = build(ModelSpec("power_law_zas", {"alpha": 4 / 3})).profile
    res = harmonic_resolution_test(*canonical_resolution(p))
    assert res.harmonically_regular
    assert abs(res.log_slope) < 1e-4


def test_flat_background_harmonic_resolution():
    phi = RadialFunction.smooth(lambda t: t / (t + 1), lambda t: 1 / (t + 1) ** 2, lambda t: -2 / (t + 1) ** 3)
    res = harmonic_resolution_test(FLAT1, phi)
    assert res.harmonically_regular


def test_resolution_precondition():
    bg, _ = exp_warp()
    bad = RadialFunction.smooth(lambda t: 1.0 + t, lambda t: 1.0, lambda t: 0.0)
    with pytest.raises(ResolutionInvalid):
        harmonic_resolution_test(bg, bad)
    sqrt_phi = RadialFunction.smooth(lambda t: math.sqrt(t), lambda t: 0.5 / math.sqrt(t),
                                     lambda t: -0.25 * t**-1.5)
    with pytest.raises(ResolutionInvalid):
        harmonic_resolution_test(bg, sqrt_phi)


@pytest.mark.parametrize("m", [-0.5, -1.0, -2.0])
def test_schwarzschild_zas_is_harmonically_regular(m):
    rep = classify_zas(build(ModelSpec("schwarzschild", {"m": m})).profile)
    assert rep.regular and rep.harmonically_regular


# -- minimal boundary factor ---------------------------------------------------


def bump(eps):
    return build(ModelSpec("sin_bump", {"eps": eps})).profile


def test_bump_ratio_and_zero():
    bf = min_boundary_conformal_factor(bump(0.1), probe_end=2 * math.pi)
    assert bf.ratio == pytest.approx(-1 / (4 * 1.1), rel=1e-14)
    assert bf.first_zero is not None and 0 < bf.first_zero < 2 * math.pi


def test_bump_positive_for_large_eps():
    assert min_boundary_conformal_factor(bump(1.0), probe_end=2 * math.pi).first_zero is None


def test_flat_sphere_factor():
    bf = min_boundary_conformal_factor(FLAT1, probe_end=1e3)
    assert bf.ratio == pytest.approx(-0.5, rel=1e-14)
    assert bf.first_zero is None


def test_first_zero_matches_quadrature_oracle():
    # u vanishes where int_0^s dt/(1 + eps + sin t) = 4
    from scipy.integrate import quad
    from scipy.optimize import brentq

    eps = 0.1
    s = brentq(lambda x: quad(lambda t: 1 / (1 + eps + math.sin(t)), 0, x, epsabs=0, epsrel=1e-13)[0] - 4,
               0.5, 2 * math.pi)
    assert min_boundary_conformal_factor(bump(eps)).first_zero == pytest.approx(s, rel=1e-9)


@given(st.floats(0.05, 2.0).filter(lambda e: abs(e - (math.sqrt(1 + math.pi**2 / 4) - 1)) > 1e-3))
def test_vanishing_iff_integral_exceeds_four(eps):
    vanishes = min_boundary_conformal_factor(bump(eps), probe_end=2 * math.pi).first_zero is not None
    assert vanishes == (2 * math.pi / math.sqrt(eps * eps + 2 * eps) > 4)


def test_requires_positive_boundary_mean_curvature():
    p = build(ModelSpec("schwarzschild_with_cylinder", {"mbar": 1.0, "L": 2.0})).resolution.background
    with pytest.raises(DomainError):
        min_boundary_conformal_factor(p)
