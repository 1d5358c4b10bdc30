"""Degree-plan construction under term-count and credit constraints.

Two strategies: `frontload` places the most complex courses as early as the
requisites and credit caps allow; `balanced` starts from that seed and moves
courses between terms until no single move or swap lowers the heaviest
term's summed complexity. Strict co-requisite groups always travel together.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .metrics import complexity_by_course, curriculum_metrics
from .model import (COREQ, PREREQ, STRICT_COREQ, Curriculum, DegreePlan,
                    ValidationReport)


class PlanInfeasibleError(ValueError):
    """Raised when no plan can satisfy the constraints; message says why."""


@dataclass(frozen=True)
class PlanConstraints:
    num_terms: int
    max_credits_per_term: float = math.inf
    min_credits_per_term: float = 0.0

    def __post_init__(self):
        if self.num_terms < 1:
            raise ValueError("num_terms must be >= 1")
        if self.max_credits_per_term <= 0:
            raise ValueError("max_credits_per_term must be positive")
        if self.min_credits_per_term < 0:
            raise ValueError("min_credits_per_term must be >= 0")


@dataclass(frozen=True)
class PlanProfile:
    """Per-term aggregates; totals match the curriculum no matter the plan."""

    term_credits: tuple[float, ...]
    term_complexity: tuple[int, ...]
    max_term_complexity: int
    complexity_variance: float

    @property
    def total_credits(self) -> float:
        return sum(self.term_credits)

    @property
    def total_complexity(self) -> int:
        return sum(self.term_complexity)


def _strict_groups(c: Curriculum) -> list[list[str]]:
    """Courses bundled by strict co-requisites; singletons otherwise."""
    parent = {v: v for v in c.course_ids()}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for r in c.requisites:
        if r.kind == STRICT_COREQ:
            a, b = find(r.source), find(r.target)
            if a != b:
                parent[a] = b
    groups: dict[str, list[str]] = {}
    for v in c.course_ids():
        groups.setdefault(find(v), []).append(v)
    return [sorted(g) for g in groups.values()]


def _feasibility_check(c: Curriculum, constraints: PlanConstraints) -> None:
    longest = curriculum_metrics(c).longest_path_length
    if longest > constraints.num_terms:
        raise PlanInfeasibleError(
            f"longest requisite chain spans {longest} courses but only "
            f"{constraints.num_terms} terms are allowed")
    total = sum(course.credits for course in c.courses)
    cap = constraints.num_terms * constraints.max_credits_per_term
    if total > cap:
        raise PlanInfeasibleError(
            f"total credits {total:g} exceed {constraints.num_terms} terms x "
            f"{constraints.max_credits_per_term:g} credits = {cap:g}")


def _term_bounds(c: Curriculum, group: list[str], placed: dict[str, int],
                 num_terms: int) -> tuple[int, int]:
    """Earliest and latest term a group may occupy given already-placed courses."""
    lo, hi = 1, num_terms
    members = set(group)
    for r in c.requisites:
        if r.kind == STRICT_COREQ:
            continue
        if r.target in members and r.source in placed and r.source not in members:
            lo = max(lo, placed[r.source] + (1 if r.kind == PREREQ else 0))
        if r.source in members and r.target in placed and r.target not in members:
            hi = min(hi, placed[r.target] - (1 if r.kind == PREREQ else 0))
    return lo, hi


def generate_plan(c: Curriculum, constraints: PlanConstraints,
                  strategy: str = "balanced", name: str | None = None) -> DegreePlan:
    """Build a valid degree plan, or raise `PlanInfeasibleError` with a diagnostic."""
    if strategy not in ("frontload", "balanced"):
        raise ValueError(f"unknown strategy {strategy!r}")
    _feasibility_check(c, constraints)

    cx = complexity_by_course(c)
    credits = {course.id: course.credits for course in c.courses}
    groups = _strict_groups(c)
    group_of = {v: i for i, g in enumerate(groups) for v in g}
    group_cx = [sum(cx[v] for v in g) for g in groups]
    group_credits = [sum(credits[v] for v in g) for g in groups]
    prereq_groups: list[set[int]] = [set() for _ in groups]
    for r in c.requisites:
        if r.kind != STRICT_COREQ and group_of[r.source] != group_of[r.target]:
            prereq_groups[group_of[r.target]].add(group_of[r.source])

    # Frontload seed: among placeable groups, highest complexity first, into
    # the earliest term with requisite clearance and credit headroom.
    placed: dict[str, int] = {}
    placed_groups: set[int] = set()
    load = [0.0] * (constraints.num_terms + 1)
    while len(placed_groups) < len(groups):
        ready = [i for i in range(len(groups))
                 if i not in placed_groups and prereq_groups[i] <= placed_groups]
        ready.sort(key=lambda i: (-group_cx[i], groups[i][0]))
        progressed = False
        for i in ready:
            lo, hi = _term_bounds(c, groups[i], placed, constraints.num_terms)
            for t in range(lo, hi + 1):
                if load[t] + group_credits[i] <= constraints.max_credits_per_term:
                    for v in groups[i]:
                        placed[v] = t
                    load[t] += group_credits[i]
                    placed_groups.add(i)
                    progressed = True
                    break
            if progressed:
                break
        if not progressed:
            stuck = ", ".join(groups[ready[0]]) if ready else "?"
            raise PlanInfeasibleError(
                f"no term has room for {stuck} under "
                f"{constraints.max_credits_per_term:g} credits per term")

    if strategy == "balanced":
        placed = _balance(c, constraints, groups, group_cx, group_credits, placed)

    terms = [[] for _ in range(constraints.num_terms)]
    for v, t in placed.items():
        terms[t - 1].append(v)
    plan = DegreePlan.of(name or strategy, terms)

    report = validate_plan(c, plan, constraints)
    if report.errors:
        raise PlanInfeasibleError("; ".join(report.errors))
    return plan


def _balance(c: Curriculum, constraints: PlanConstraints, groups, group_cx,
             group_credits, placed: dict[str, int]) -> dict[str, int]:
    """First-improvement local search lowering the max per-term complexity."""
    num_terms = constraints.num_terms

    def term_cx(assign):
        totals = [0] * (num_terms + 1)
        for i, g in enumerate(groups):
            totals[assign_of(assign, i)] += group_cx[i]
        return totals

    def assign_of(assign, i):
        return assign[groups[i][0]]

    def loads(assign):
        totals = [0.0] * (num_terms + 1)
        for i, g in enumerate(groups):
            totals[assign_of(assign, i)] += group_credits[i]
        return totals

    def score(assign):
        totals = term_cx(assign)[1:]
        mean = sum(totals) / num_terms
        var = sum((x - mean) ** 2 for x in totals) / num_terms
        return (max(totals), var)

    def apply_move(assign, i, t):
        out = dict(assign)
        for v in groups[i]:
            out[v] = t
        return out

    def legal(assign):
        totals = loads(assign)
        if any(x > constraints.max_credits_per_term for x in totals[1:]):
            return False
        for r in c.requisites:
            ts, tt = assign[r.source], assign[r.target]
            if r.kind == PREREQ and not ts < tt:
                return False
            if r.kind == COREQ and not ts <= tt:
                return False
            if r.kind == STRICT_COREQ and ts != tt:
                return False
        return True

    current = dict(placed)
    best = score(current)
    improved = True
    while improved:
        improved = False
        order = sorted(range(len(groups)), key=lambda i: groups[i][0])
        for i in order:
            for t in range(1, num_terms + 1):
                if t == assign_of(current, i):
                    continue
                candidate = apply_move(current, i, t)
                if legal(candidate) and score(candidate) < best:
                    current, best, improved = candidate, score(candidate), True
                    break
            if improved:
                break
        if improved:
            continue
        for i, j in itertools.combinations(order, 2):
            ti, tj = assign_of(current, i), assign_of(current, j)
            if ti == tj:
                continue
            candidate = apply_move(apply_move(current, i, tj), j, ti)
            if legal(candidate) and score(candidate) < best:
                current, best, improved = candidate, score(candidate), True
                break
    return current


def validate_plan(c: Curriculum, plan: DegreePlan,
                  constraints: PlanConstraints | None = None) -> ValidationReport:
    """Check completeness, requisite ordering, and (optionally) credit limits."""
    report = ValidationReport()
    from .model import _validate_plan
    _validate_plan(plan, set(c.course_ids()), list(c.requisites), report.errors)
    if constraints is not None:
        if len(plan.terms) > constraints.num_terms:
            report.errors.append(f"plan {plan.name!r} uses {len(plan.terms)} terms, "
                                 f"limit is {constraints.num_terms}")
        for k, term in enumerate(plan.terms, 1):
            total = sum(c.course(cid).credits for cid in term if cid in c)
            if total > constraints.max_credits_per_term:
                report.errors.append(f"term {k} carries {total:g} credits, "
                                     f"cap is {constraints.max_credits_per_term:g}")
            if total < constraints.min_credits_per_term:
                report.errors.append(f"term {k} carries {total:g} credits, "
                                     f"minimum is {constraints.min_credits_per_term:g}")
    return report


def plan_profile(c: Curriculum, plan: DegreePlan) -> PlanProfile:
    """Per-term credit and complexity aggregates for a valid plan."""
    report = validate_plan(c, plan)
    if report.errors:
        raise ValueError("invalid plan: " + "; ".join(report.errors))
    cx = complexity_by_course(c)
    term_credits = []
    term_complexity = []
    for term in plan.terms:
        term_credits.append(sum(c.course(cid).credits for cid in term))
        term_complexity.append(sum(cx[cid] for cid in term))
    n = len(plan.terms)
    mean = sum(term_complexity) / n if n else 0.0
    variance = sum((x - mean) ** 2 for x in term_complexity) / n if n else 0.0
    return PlanProfile(tuple(term_credits), tuple(term_complexity),
                       max(term_complexity) if term_complexity else 0, variance)
