"""Sharp Sobolev-type inequalities on the weighted half-line cone.

The package computes optimal constants and extremal profiles for a catalog of
Sobolev-type inequalities on the weighted measure space (R_+, N*omega_N*r^{N-1} dr),
checks them by quadrature, rearranges radial functions from synthetic
radially symmetric spaces onto that cone, and runs blow-down experiments that
turn a supported inequality into a lower bound on the asymptotic volume ratio.
"""

__version__ = "0.1.0"

SCHEMA = "cone-sobolev/1"

from .model_cone import ModelCone, ExtremalProfile, cone_volume
from .catalog import Family, InequalitySpec, make_spec, optimal_constant, extremizer, quotient, cd_constant
from .spaces import RadialSpace, builtin_space, estimate_avr
from .blowdown import BlowdownReport, avr_lower_bound, end_to_end_blowdown

__all__ = [
    "SCHEMA",
    "ModelCone",
    "ExtremalProfile",
    "cone_volume",
    "Family",
    "InequalitySpec",
    "make_spec",
    "optimal_constant",
    "extremizer",
    "quotient",
    "cd_constant",
    "RadialSpace",
    "builtin_space",
    "estimate_avr",
    "BlowdownReport",
    "avr_lower_bound",
    "end_to_end_blowdown",
]
