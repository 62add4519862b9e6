"""Zero area singularities of spherically symmetric Riemannian 3-manifolds."""

from .geometry import (
    ExtendedMass,
    ZasReport,
    adm_mass,
    capacity_of_slice,
    capacity_of_zas,
    check_penrose,
    check_zas_inequality,
    classify_zas,
    h43_mass_limit,
    hawking_mass,
    omae_radius,
    reg_mass_of_slice,
    zas_mass,
)
from .models import ModelSpec, build, cylinder_reference, load_profile, parse_model
from .profile import RadialProfile, Segment, Tail

__version__ = "0.1.0"

__all__ = [
    "ExtendedMass", "ZasReport", "adm_mass", "capacity_of_slice", "capacity_of_zas", "check_penrose",
    "check_zas_inequality", "classify_zas", "h43_mass_limit", "hawking_mass", "omae_radius",
    "reg_mass_of_slice", "zas_mass", "ModelSpec", "build", "cylinder_reference", "load_profile",
    "parse_model", "RadialProfile", "Segment", "Tail",
]
