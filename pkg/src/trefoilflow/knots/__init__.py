"""Lorenz words, positive braids, planar diagrams and Alexander polynomials."""
from .alexander import TREFOIL, UNKNOT, AlexanderPoly, alexander_from_braid, alexander_from_diagram
from .braids import Braid, NotAKnot, genus_positive_braid, lorenz_braid
from .diagram import DegenerateCurve, DiagramError, KnotDiagram, braid_closure_diagram, polyline_to_diagram
from .ghys import GhysReport, ghys_word_check, knot_certificate
from .words import LorenzWord, primitive_mixed_words

__all__ = [
    "TREFOIL", "UNKNOT", "AlexanderPoly", "alexander_from_braid", "alexander_from_diagram",
    "Braid", "NotAKnot", "genus_positive_braid", "lorenz_braid",
    "DegenerateCurve", "DiagramError", "KnotDiagram", "braid_closure_diagram",
    "polyline_to_diagram", "LorenzWord", "primitive_mixed_words",
    "GhysReport", "ghys_word_check", "knot_certificate",
]
