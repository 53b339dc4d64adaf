"""Small epsilon-nets for translates of polytopes in three dimensions."""

from .approx import HittingInstance, Solution, bg_hitting_set, dualize, lp_weights, set_cover
from .decompose import PolytopeFamily, polytope_net
from .geometry import ConvexPolytope, Halfspace, SimplicialCone
from .planar import cone_net

__version__ = "0.1.0"

__all__ = [
    "ConvexPolytope", "Halfspace", "HittingInstance", "PolytopeFamily", "SimplicialCone", "Solution",
    "bg_hitting_set", "cone_net", "dualize", "lp_weights", "polytope_net", "set_cover",
]
