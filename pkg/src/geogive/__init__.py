"""Location-based freecycling platform with consent-gated study analytics."""

__version__ = "0.1.0"
