"""Exact counts of monic integer polynomials of bounded height with a root in a number field."""

from .polyz import FactorizationResult, Polynomial, factor, height, mahler_measure
from .numfield import FieldDescriptor, FieldElement, parse_field_spec, quadratic_field, rational_field
from .census import CensusReport, census_bruteforce, census_constructive
from .bounds import BoundReport, irr_bound_cor3, predicted_class, red_bound_cor2

__version__ = "1.0.0"
