"""Structural complexity factors for curriculum graphs.

Per-course factors: delay (longest path through the course, in vertices),
blocking (courses it transitively unlocks), reachability (courses that must
transitively precede it), and centrality (total length of source-to-sink
paths passing through it as an interior vertex). The composite structural
complexity of a course is delay + blocking, and curriculum totals are sums
over courses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Curriculum, topological_order, weakly_connected_components
from .model import PREREQ, COREQ


@dataclass(frozen=True)
class CourseMetrics:
    course_id: str
    delay: int
    blocking: int
    reachability: int
    centrality: int
    complexity: int  # delay + blocking


@dataclass(frozen=True)
class MetricsReport:
    """Per-course factors plus curriculum totals and maximal-length paths."""

    courses: tuple[CourseMetrics, ...]
    delay: int
    blocking: int
    reachability: int
    complexity: int  # delay + blocking
    longest_paths: tuple[tuple[str, ...], ...]

    def course(self, course_id: str) -> CourseMetrics:
        for m in self.courses:
            if m.course_id == course_id:
                return m
        raise KeyError(f"unknown course id: {course_id!r}")

    @property
    def longest_path_length(self) -> int:
        return len(self.longest_paths[0]) if self.longest_paths else 0


def _longest_chain_in(c: Curriculum, order: list[str]) -> dict[str, int]:
    """Vertex count of the longest path ending at each course (itself included)."""
    lin = {}
    for v in order:
        preds = c._pred[v]
        lin[v] = 1 + max((lin[u] for u in preds), default=0)
    return lin


def _longest_chain_out(c: Curriculum, order: list[str]) -> dict[str, int]:
    lout = {}
    for v in reversed(order):
        succs = c._succ[v]
        lout[v] = 1 + max((lout[w] for w in succs), default=0)
    return lout


def delay_factor(c: Curriculum, course_id: str) -> int:
    """Vertex count of the longest source-to-sink path through the course."""
    c.course(course_id)
    order = topological_order(c)
    lin = _longest_chain_in(c, order)
    lout = _longest_chain_out(c, order)
    return lin[course_id] + lout[course_id] - 1


def blocking_factor(c: Curriculum, course_id: str) -> int:
    """Number of courses unreachable until this one is passed."""
    from .model import reachable_set
    return len(reachable_set(c, course_id, "forward"))


def reachability_factor(c: Curriculum, course_id: str) -> int:
    """Number of courses that must be completed before this one."""
    from .model import reachable_set
    return len(reachable_set(c, course_id, "backward"))


def _centrality_tables(c: Curriculum, order: list[str]):
    """Path-count and vertex-sum tables for source-rooted and sink-rooted paths.

    cnt_in[v]/sum_in[v] cover paths of >= 2 vertices from any in-degree-zero
    course to v; cnt_out/sum_out mirror them toward out-degree-zero courses.
    Counts are exact integers, so exponentially many paths are fine.
    """
    cnt_in = {v: 0 for v in order}
    sum_in = {v: 0 for v in order}
    for v in order:
        for u in c._pred[v]:
            src = 1 if not c._pred[u] else 0
            cnt_in[v] += cnt_in[u] + src
            sum_in[v] += sum_in[u] + cnt_in[u] + 2 * src
    cnt_out = {v: 0 for v in order}
    sum_out = {v: 0 for v in order}
    for v in reversed(order):
        for w in c._succ[v]:
            snk = 1 if not c._succ[w] else 0
            cnt_out[v] += cnt_out[w] + snk
            sum_out[v] += sum_out[w] + cnt_out[w] + 2 * snk
    return cnt_in, sum_in, cnt_out, sum_out


def centrality(c: Curriculum, course_id: str) -> int:
    """Sum of vertex counts over all source-to-sink paths with the course interior.

    Sources and sinks always measure zero.
    """
    c.course(course_id)
    if not c._pred[course_id] or not c._succ[course_id]:
        return 0
    order = topological_order(c)
    cnt_in, sum_in, cnt_out, sum_out = _centrality_tables(c, order)
    ci, co = cnt_in[course_id], cnt_out[course_id]
    return co * sum_in[course_id] + ci * sum_out[course_id] - ci * co


def degrees_of_freedom(c: Curriculum, num_terms: int,
                       max_per_term: int | None = None) -> int:
    """Number of valid term assignments of the curriculum over `num_terms` terms.

    Counts every assignment satisfying the requisite ordering rules (prereq
    strictly earlier, coreq earlier-or-same, strict coreq same term), the
    original plan included. `max_per_term` optionally caps courses per term.
    Returns 0 when the longest requisite chain does not fit.
    """
    if num_terms < 1:
        raise ValueError(f"num_terms must be >= 1, got {num_terms}")
    order = topological_order(c)
    if not order:
        return 1
    lout = _longest_chain_out(c, order)

    kind_of = {(r.source, r.target): r.kind for r in c.requisites}

    def count_group(group: list[str], capacity: list[int] | None) -> int:
        sub_order = [v for v in order if v in group]
        assigned: dict[str, int] = {}

        def rec(i: int) -> int:
            if i == len(sub_order):
                return 1
            v = sub_order[i]
            lo, hi = 1, num_terms - (lout[v] - 1)
            for u in c._pred[v]:
                k = kind_of[(u, v)]
                if k == PREREQ:
                    lo = max(lo, assigned[u] + 1)
                elif k == COREQ:
                    lo = max(lo, assigned[u])
                else:  # strict coreq: same term exactly
                    lo = max(lo, assigned[u])
                    hi = min(hi, assigned[u])
            total = 0
            for t in range(lo, hi + 1):
                if capacity is not None:
                    if capacity[t] == 0:
                        continue
                    capacity[t] -= 1
                assigned[v] = t
                total += rec(i + 1)
                del assigned[v]
                if capacity is not None:
                    capacity[t] += 1
            return total

        return rec(0)

    if max_per_term is None:
        # No shared capacity: weakly connected components place independently.
        total = 1
        for group in weakly_connected_components(c):
            total *= count_group(group, None)
        return total
    capacity = [max_per_term] * (num_terms + 1)
    return count_group(list(order), capacity)


def _maximal_paths(c: Curriculum, order: list[str],
                   lin: dict[str, int], lout: dict[str, int]) -> list[tuple[str, ...]]:
    """Every source-to-sink path achieving the maximum vertex count."""
    if not order:
        return []
    longest = max(lin[v] + lout[v] - 1 for v in order)
    paths: list[tuple[str, ...]] = []

    def extend(v: str, prefix: list[str]):
        prefix.append(v)
        if not c._succ[v]:
            paths.append(tuple(prefix))
        else:
            for w in sorted(c._succ[v]):
                if lin[v] + lout[w] == longest and lin[w] == lin[v] + 1:
                    extend(w, prefix)
        prefix.pop()

    for v in sorted(order):
        if not c._pred[v] and lout[v] == longest:
            extend(v, [])
    return paths


def curriculum_metrics(c: Curriculum) -> MetricsReport:
    """All per-course factors, curriculum totals, and the maximal-length paths."""
    order = topological_order(c)
    lin = _longest_chain_in(c, order)
    lout = _longest_chain_out(c, order)
    cnt_in, sum_in, cnt_out, sum_out = _centrality_tables(c, order)

    # Transitive closure as bitsets over the topological index.
    idx = {v: i for i, v in enumerate(order)}
    fwd = {v: 0 for v in order}
    for v in reversed(order):
        bits = 0
        for w in c._succ[v]:
            bits |= fwd[w] | (1 << idx[w])
        fwd[v] = bits
    bwd = {v: 0 for v in order}
    for v in order:
        bits = 0
        for u in c._pred[v]:
            bits |= bwd[u] | (1 << idx[u])
        bwd[v] = bits

    rows = []
    for course in c.courses:
        v = course.id
        d = lin[v] + lout[v] - 1
        b = bin(fwd[v]).count("1")
        r = bin(bwd[v]).count("1")
        if not c._pred[v] or not c._succ[v]:
            q = 0
        else:
            q = cnt_out[v] * sum_in[v] + cnt_in[v] * sum_out[v] - cnt_in[v] * cnt_out[v]
        rows.append(CourseMetrics(v, d, b, r, q, d + b))

    return MetricsReport(
        courses=tuple(rows),
        delay=sum(m.delay for m in rows),
        blocking=sum(m.blocking for m in rows),
        reachability=sum(m.reachability for m in rows),
        complexity=sum(m.complexity for m in rows),
        longest_paths=tuple(_maximal_paths(c, order, lin, lout)),
    )


def complexity_by_course(c: Curriculum) -> dict[str, int]:
    """Shortcut mapping course id -> delay + blocking."""
    return {m.course_id: m.complexity for m in curriculum_metrics(c).courses}
