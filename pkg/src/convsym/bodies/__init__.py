"""Convex body representations, symmetrizations and geometric functionals."""

from .support import (Ball, GridBody, Polytope, ReflectedAverage, Scaled, Segment, SupportBody,
                      Translated, Zonotope, box, cross_polytope, cube, cube_polytope,
                      minkowski_symmetrize, orthogonal_symmetrize, random_polytope, recenter,
                      regular_simplex, sample_on, seed_body, steiner_point)
from .polygon import (PolygonBody, convex_hull_2d, decimate, random_polygon, rectangle,
                      regular_polygon, restore_area, steiner_symmetrize_polygon, chord_lengths)
from .polytope import (PolytopeBody3, cube3, random_polytope3, sampled_ball,
                       steiner_symmetrize_sampled3)
