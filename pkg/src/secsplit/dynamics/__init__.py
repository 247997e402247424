"""Numerical flow, periodic orbit, invariant manifolds and splitting."""

from .integrator import Event, EventHit, IntegratorConfig, Trajectory, integrate
from .manifolds import ManifoldCurve, TrigInterpolant, flow_branch, grow_manifold
from .section import FixedPoint, ReturnMap, Section, find_fixed_point, return_map
from .splitting import (
    Certificate, SplittingReport, SplittingResult, Transversal, measure_splitting,
    splitting_at, transversality_certificate,
)

__all__ = [
    "Event", "EventHit", "IntegratorConfig", "Trajectory", "integrate",
    "ManifoldCurve", "TrigInterpolant", "flow_branch", "grow_manifold",
    "FixedPoint", "ReturnMap", "Section", "find_fixed_point", "return_map",
    "Certificate", "SplittingReport", "SplittingResult", "Transversal",
    "measure_splitting", "splitting_at", "transversality_certificate",
]
