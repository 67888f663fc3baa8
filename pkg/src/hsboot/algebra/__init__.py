from .field import FieldElement, FieldSpec, field_arith, odometer
from .linalg import kernel_vector, nullspace_vector
from .poly import MultiPoly, UniPoly, interpolate, monomials, multi_divide_exact, multi_eval, uni_interpolate

__all__ = [
    "FieldElement",
    "FieldSpec",
    "MultiPoly",
    "UniPoly",
    "field_arith",
    "interpolate",
    "kernel_vector",
    "monomials",
    "multi_divide_exact",
    "multi_eval",
    "nullspace_vector",
    "odometer",
    "uni_interpolate",
]
