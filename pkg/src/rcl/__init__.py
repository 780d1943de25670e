"""Red/blue colourings avoiding a non-spherical set and blue unit-spaced lines."""

__version__ = "0.1.0"

from .numfield import FieldElement, parse as parse_field  # noqa: F401
