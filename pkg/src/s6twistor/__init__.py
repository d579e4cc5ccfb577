"""Cayley structures on S^6, the twistor bundle and nearly Kaehler families."""
from ._backend import BACKEND
from .cayley import (
    CayleyStructure,
    VariableCayleySection,
    is_nearly_kahler,
    nabla_J,
    operator_distance,
    structures_equal,
)
from .errors import S6TwistorError
from .exterior import AlternatingForm, interior, volume_form, wedge
from .forms import SU3Structure, cone_extract, hitchin, nk_pde_check
from .octonion import Octonion, is_g2, multiply, random_g2, random_rotation
from .twistor import (
    PERIOD,
    StructureFamily,
    TwistorPoint,
    family_through,
    intersection_scan,
    lift_to_cayley,
    membership_test,
    random_twistor_point,
    transversality_test,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AlternatingForm",
    "CayleyStructure",
    "Octonion",
    "PERIOD",
    "S6TwistorError",
    "SU3Structure",
    "StructureFamily",
    "TwistorPoint",
    "VariableCayleySection",
    "cone_extract",
    "family_through",
    "hitchin",
    "interior",
    "intersection_scan",
    "is_g2",
    "is_nearly_kahler",
    "lift_to_cayley",
    "membership_test",
    "multiply",
    "nabla_J",
    "nk_pde_check",
    "operator_distance",
    "random_g2",
    "random_rotation",
    "random_twistor_point",
    "structures_equal",
    "transversality_test",
    "volume_form",
    "wedge",
]
