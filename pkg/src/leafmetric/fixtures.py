"""Named vector fields used by the scans and the test suite."""
from __future__ import annotations

from .parser import parse_field
from .polynomial import PolyVectorField

FIXTURES = {
    "example5": "(2*z + w^2 - z^3) d/dz + (w - z^2*w) d/dw",
    "radial": "z d/dz + w d/dw",
    "diag21": "2*z d/dz + w d/dw",
    "degenerate": "z^2 d/dz + w d/dw",
}

# default singular chart (center, Euclidean ball radius) around the origin
CHART_RADIUS = {"example5": 0.5, "radial": 1.0, "diag21": 1.0, "degenerate": 0.5}

# leaves with closed-form covers: fixture -> p for the field diag(p, 1)
DIAGONAL_POWER = {"radial": 1, "diag21": 2}


def get_fixture(name: str) -> PolyVectorField:
    try:
        return parse_field(FIXTURES[name])
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}") from None
