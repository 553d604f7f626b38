"""Core utilities and configuration for diffcipher."""

from .field import FieldElem, FieldError, FieldOp, PrimeField, ff_arith, ff_element_order
from .settings import DiffCipherSettings, load_settings

__all__ = [
    "DiffCipherSettings",
    "FieldElem",
    "FieldError",
    "FieldOp",
    "PrimeField",
    "ff_arith",
    "ff_element_order",
    "load_settings",
]
