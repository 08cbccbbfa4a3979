"""Holonomy and equivariant holonomy of invariant U(1) connections."""

from .bundle import (SphereFrameBundle, make_flat_plane_bundle, make_heisenberg_torus_bundle,
                     momentum, shift_connection)
from .errors import IntegrationError, ProvenanceError, ValidationError
from .holonomy import equivariant_holonomy, horizontal_lift, isotropy_character
from .lie import DeckElement, Phase, Rotation, so3_exp
from .quotient import WeightedHopfBundle

__all__ = [
    "DeckElement", "IntegrationError", "Phase", "ProvenanceError", "Rotation",
    "SphereFrameBundle", "ValidationError", "WeightedHopfBundle", "equivariant_holonomy",
    "horizontal_lift", "isotropy_character", "make_flat_plane_bundle",
    "make_heisenberg_torus_bundle", "momentum", "shift_connection", "so3_exp",
]
