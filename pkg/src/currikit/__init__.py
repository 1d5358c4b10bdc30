"""Curriculum analytics: requisite-graph complexity metrics, progression
simulation, balanced-curriculum studies, and degree-plan construction."""

from .model import (BACKWARD, COREQ, FORWARD, PREREQ, STRICT_COREQ, Course,
                    Curriculum, DegreePlan, Edit, Requisite, ValidationReport,
                    apply_edit, apply_edits, build_curriculum, reachable_set,
                    topological_order, weakly_connected_components)
from .metrics import (CourseMetrics, MetricsReport, blocking_factor, centrality,
                      complexity_by_course, curriculum_metrics, degrees_of_freedom,
                      delay_factor, reachability_factor)
from .simulation import (ANALYTIC, EXACT, MONTE_CARLO, EnrollmentPolicy,
                         PassRateTable, SimResult, SimulationConfig,
                         completion_at, first_attempt_schedule, simulate)

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC", "BACKWARD", "COREQ", "EXACT", "FORWARD", "MONTE_CARLO",
    "PREREQ", "STRICT_COREQ", "Course", "CourseMetrics", "Curriculum",
    "DegreePlan", "Edit", "EnrollmentPolicy", "MetricsReport", "PassRateTable",
    "Requisite", "SimResult", "SimulationConfig", "ValidationReport",
    "apply_edit", "apply_edits", "blocking_factor", "build_curriculum",
    "centrality", "complexity_by_course", "completion_at", "curriculum_metrics",
    "degrees_of_freedom", "delay_factor", "first_attempt_schedule",
    "reachability_factor", "reachable_set", "simulate", "topological_order",
    "weakly_connected_components",
]
