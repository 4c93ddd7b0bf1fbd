"""Numerical tools for leafwise Poincare metrics of singular holomorphic foliations."""
from .beltrami import BeltramiField, GridMap, chain_mu_probe, mu_of_map, solve_beltrami
from .disc import HyperbolicRadius, disc_automorphism, log_star, poincare_distance
from .eta import (EtaEstimate, HolderSample, eta_lower, eta_oracle_punctured_disc, holder_scan,
                  leaf_path_poincare_length, mln_fit)
from .flow import FieldConstants, FlowSegment, estimate_field_constants, flow, flow_domain_radius
from .parser import FieldSyntaxError, parse_field
from .polynomial import (CPoint, MPoly, PolyVectorField, blow_up_pullback, evaluate, format_field,
                         jacobian, one_jet)
from .projection import (ChainRecord, ProjectionProbe, chain_projections, g_value, phi,
                         project_time, projection_norms)
from .singular import SingularPoint, classify, distance_to_E, find_singularities

__all__ = [
    "BeltramiField", "CPoint", "ChainRecord", "EtaEstimate", "FieldConstants", "FieldSyntaxError",
    "FlowSegment", "GridMap", "HolderSample", "HyperbolicRadius", "MPoly", "PolyVectorField",
    "ProjectionProbe", "SingularPoint", "blow_up_pullback", "chain_mu_probe", "chain_projections",
    "classify", "disc_automorphism", "distance_to_E", "estimate_field_constants", "eta_lower",
    "eta_oracle_punctured_disc", "evaluate", "find_singularities", "flow", "flow_domain_radius",
    "format_field", "g_value", "holder_scan", "jacobian", "leaf_path_poincare_length", "log_star",
    "mln_fit", "mu_of_map", "one_jet", "parse_field", "phi", "poincare_distance", "project_time",
    "projection_norms", "solve_beltrami",
]
