"""Balanced-curriculum enumeration and complexity-versus-completion studies.

A space of balanced curricula holds every graph on n courses split evenly
over T ordered terms, with requisite edges only from earlier terms to later
ones (optionally plus within-term coreqs). Structurally identical members --
equal up to relabeling courses within a term -- are deduplicated through a
canonical adjacency encoding. Studies simulate each member at a flat pass
rate and correlate completion with structural complexity.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass

from .metrics import curriculum_metrics
from .model import COREQ, PREREQ, Course, Curriculum, DegreePlan, Requisite, build_curriculum
from .simulation import (ANALYTIC, PassRateTable, SimulationConfig, simulate)


@dataclass(frozen=True)
class CurriculumSpace:
    n_courses: int
    n_terms: int
    include_coreqs: bool
    dedupe_isomorphic: bool
    members: tuple[Curriculum, ...]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class StudyPoint:
    member: str
    complexity: int
    delay: int
    blocking: int
    completion: float


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]

    def predict(self, x: float) -> float:
        return self.slope * x + self.intercept


def _encode(edges, term_of) -> tuple:
    return tuple(sorted(edges))


def _canonical_key(edges, blocks) -> tuple:
    """Minimal encoding of an edge set over all within-term relabelings."""
    best = None
    for perms in itertools.product(*[itertools.permutations(b) for b in blocks]):
        relabel = {}
        for block, perm in zip(blocks, perms):
            for a, b in zip(block, perm):
                relabel[a] = b
        candidate = tuple(sorted((relabel[s], relabel[t], k) for s, t, k in edges))
        if best is None or candidate < best:
            best = candidate
    return best


def enumerate_balanced(n_courses: int, n_terms: int, include_coreqs: bool = False,
                       dedupe: bool = True) -> CurriculumSpace:
    """All balanced curricula on `n_courses` over `n_terms`, smallest first.

    Every subset of the cross-term edge set appears, so redundant forward
    edges (term 1 -> term 3 alongside a chained path) are legitimate members.
    With `dedupe`, one representative per within-term relabeling class is
    kept: the member whose own encoding equals the class's canonical key.
    """
    if n_courses % n_terms != 0:
        raise ValueError(f"{n_courses} courses do not divide evenly over {n_terms} terms")
    per_term = n_courses // n_terms
    ids = [f"v{i + 1}" for i in range(n_courses)]
    blocks = [tuple(ids[k * per_term:(k + 1) * per_term]) for k in range(n_terms)]
    term_of = {cid: k for k, block in enumerate(blocks) for cid in block}

    candidates: list[tuple[str, str, str]] = []
    for u, w in itertools.combinations(ids, 2):
        if term_of[u] < term_of[w]:
            candidates.append((u, w, PREREQ))
        elif include_coreqs and term_of[u] == term_of[w]:
            candidates.append((u, w, COREQ))

    plan = DegreePlan.of("balanced", [list(b) for b in blocks])
    courses = [Course(cid) for cid in ids]
    members: list[tuple[tuple, Curriculum]] = []
    for bits in range(1 << len(candidates)):
        edges = [candidates[i] for i in range(len(candidates)) if bits >> i & 1]
        encoding = _encode(edges, term_of)
        if dedupe and encoding != _canonical_key(edges, blocks):
            continue
        name = f"balanced-{n_courses}x{n_terms}-{bits:0{max(1, (len(candidates) + 3) // 4)}x}"
        built = build_curriculum(name, courses, [Requisite(*e) for e in edges], [plan])
        assert isinstance(built, Curriculum), built
        members.append((encoding, built))
    members.sort(key=lambda pair: pair[0])
    return CurriculumSpace(n_courses, n_terms, include_coreqs, dedupe,
                           tuple(m for _, m in members))


def complexity_completion_study(space: CurriculumSpace, pass_rate: float,
                                horizon_terms: int, mode: str = ANALYTIC,
                                students: int = 10_000, seed: int = 0) -> list[StudyPoint]:
    """Simulate every member and pair its complexity with its completion rate."""
    points = []
    for member in space.members:
        report = curriculum_metrics(member)
        cfg = SimulationConfig(horizon_terms=horizon_terms, mode=mode, plan="balanced",
                               rates=PassRateTable.uniform(pass_rate),
                               students=students, seed=seed)
        result = simulate(member, cfg)
        points.append(StudyPoint(member=member.name,
                                 complexity=report.complexity,
                                 delay=report.delay,
                                 blocking=report.blocking,
                                 completion=result.grad_rate[horizon_terms - 1]))
    return points


def linear_fit(points) -> RegressionResult:
    """Ordinary least squares over (x, y) pairs with the usual r-squared.

    Accepts any iterable of pairs (StudyPoints: use (p.complexity,
    p.completion)). Requires at least two distinct x values.
    """
    xy = [(float(x), float(y)) for x, y in points]
    if len({x for x, _ in xy}) < 2:
        raise ValueError("linear_fit needs at least two distinct x values")
    n = len(xy)
    mx = sum(x for x, _ in xy) / n
    my = sum(y for _, y in xy) / n
    sxx = sum((x - mx) ** 2 for x, _ in xy)
    sxy = sum((x - mx) * (y - my) for x, y in xy)
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in xy)
    ss_tot = sum((y - my) ** 2 for _, y in xy)
    r2 = 0.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RegressionResult(slope, intercept, r2, tuple(xy))


def pass_rate_sweep(c: Curriculum, plan: str, rates, horizon_terms: int,
                    mode: str = ANALYTIC, students: int = 10_000,
                    seed: int = 0) -> list[tuple[float, float]]:
    """Completion rate at the horizon for each flat pass rate in `rates`."""
    curve = []
    for rate in rates:
        cfg = SimulationConfig(horizon_terms=horizon_terms, mode=mode, plan=plan,
                               rates=PassRateTable.uniform(rate),
                               students=students, seed=seed)
        result = simulate(c, cfg)
        curve.append((float(rate), result.grad_rate[horizon_terms - 1]))
    return curve


def study_to_csv(points: list[StudyPoint], fileobj=None) -> str:
    """Write study points as CSV (canonical_id, h, delay, blocking, completion)."""
    buffer = fileobj or io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["canonical_id", "h", "delay_total", "blocking_total", "completion"])
    for p in points:
        writer.writerow([p.member, p.complexity, p.delay, p.blocking,
                         repr(p.completion)])
    return buffer.getvalue() if fileobj is None else ""
