"""Curriculum graph model: courses, requisite edges, degree plans, validation, edits.

A curriculum is a directed acyclic graph whose vertices are courses and whose
edges are requisite relations (prereq, coreq, strict_coreq). Curricula are
immutable once built; all editing goes through `apply_edit`, which returns a
new validated curriculum or a `ValidationReport`.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

PREREQ = "prereq"
COREQ = "coreq"
STRICT_COREQ = "strict_coreq"
REQUISITE_KINDS = (PREREQ, COREQ, STRICT_COREQ)

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Course:
    """A course vertex. `credits` only matters to planning, never to metrics."""

    id: str
    name: str = ""
    credits: float = 3.0
    canonical_name: str | None = None


@dataclass(frozen=True)
class Requisite:
    """A directed requisite edge: `source` must be satisfied before `target`.

    kind: prereq (source passed in a strictly earlier term), coreq (earlier or
    same term), strict_coreq (same term; stored once, direction is incidental).
    """

    source: str
    target: str
    kind: str = PREREQ


@dataclass(frozen=True)
class DegreePlan:
    """A term-by-term assignment of every course in a curriculum.

    `terms[k]` is the tuple of course ids taken in term k+1 (ids kept sorted).
    """

    name: str
    terms: tuple[tuple[str, ...], ...]

    @staticmethod
    def of(name: str, terms) -> "DegreePlan":
        return DegreePlan(name, tuple(tuple(sorted(t)) for t in terms))

    def term_of(self, course_id: str) -> int:
        """1-based term index of a course; KeyError if absent."""
        for k, term in enumerate(self.terms, 1):
            if course_id in term:
                return k
        raise KeyError(f"course {course_id!r} not in plan {self.name!r}")

    def course_ids(self) -> list[str]:
        return [cid for term in self.terms for cid in term]


@dataclass
class ValidationReport:
    """Findings from building or editing a curriculum.

    A curriculum is constructible only when `errors` is empty; forward-edge
    findings are warnings, never errors.
    """

    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class Edit:
    """A single what-if edit operation. Use the classmethod constructors."""

    op: str
    course: Course | None = None
    course_id: str | None = None
    requisite: Requisite | None = None
    plan: str | None = None
    term: int | None = None

    @classmethod
    def add_course(cls, course: Course) -> "Edit":
        return cls(op="add_course", course=course)

    @classmethod
    def remove_course(cls, course_id: str) -> "Edit":
        return cls(op="remove_course", course_id=course_id)

    @classmethod
    def add_requisite(cls, source: str, target: str, kind: str = PREREQ) -> "Edit":
        return cls(op="add_requisite", requisite=Requisite(source, target, kind))

    @classmethod
    def remove_requisite(cls, source: str, target: str, kind: str | None = None) -> "Edit":
        return cls(op="remove_requisite", requisite=Requisite(source, target, kind or PREREQ),
                   course_id=None if kind else "*any*")

    @classmethod
    def move_course(cls, plan: str, course_id: str, term: int) -> "Edit":
        return cls(op="move_course", plan=plan, course_id=course_id, term=term)


class Curriculum:
    """An immutable, validated curriculum graph.

    Construct through `build_curriculum` (or io_formats.parse_curriculum),
    never directly: the constructor trusts its arguments.
    """

    def __init__(self, name: str, courses: tuple[Course, ...],
                 requisites: tuple[Requisite, ...], plans: tuple[DegreePlan, ...]):
        self.name = name
        self.courses = courses
        self.requisites = requisites
        self.plans = plans
        self._by_id = {c.id: c for c in courses}
        succ: dict[str, list[str]] = {c.id: [] for c in courses}
        pred: dict[str, list[str]] = {c.id: [] for c in courses}
        for r in requisites:
            succ[r.source].append(r.target)
            pred[r.target].append(r.source)
        self._succ = {v: tuple(ws) for v, ws in succ.items()}
        self._pred = {v: tuple(us) for v, us in pred.items()}

    # -- read access -------------------------------------------------------

    def course_ids(self) -> list[str]:
        return [c.id for c in self.courses]

    def course(self, course_id: str) -> Course:
        try:
            return self._by_id[course_id]
        except KeyError:
            raise KeyError(f"unknown course id: {course_id!r}") from None

    def __contains__(self, course_id: str) -> bool:
        return course_id in self._by_id

    def __len__(self) -> int:
        return len(self.courses)

    def successors(self, course_id: str) -> tuple[str, ...]:
        self.course(course_id)
        return self._succ[course_id]

    def predecessors(self, course_id: str) -> tuple[str, ...]:
        self.course(course_id)
        return self._pred[course_id]

    def predecessor_requisites(self, course_id: str) -> list[Requisite]:
        return [r for r in self.requisites if r.target == course_id]

    def plan(self, name: str) -> DegreePlan:
        for p in self.plans:
            if p.name == name:
                return p
        raise KeyError(f"curriculum {self.name!r} has no plan named {name!r}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, Curriculum):
            return NotImplemented
        return (self.name == other.name
                and sorted(self.courses, key=lambda c: c.id) == sorted(other.courses, key=lambda c: c.id)
                and sorted(self.requisites, key=lambda r: (r.source, r.target, r.kind))
                == sorted(other.requisites, key=lambda r: (r.source, r.target, r.kind))
                and sorted(self.plans, key=lambda p: p.name) == sorted(other.plans, key=lambda p: p.name))

    def __repr__(self) -> str:
        return (f"Curriculum({self.name!r}, {len(self.courses)} courses, "
                f"{len(self.requisites)} requisites, {len(self.plans)} plans)")


# -- validation and construction -------------------------------------------


def _find_cycle(ids: list[str], succ: dict[str, list[str]]) -> list[str] | None:
    """Return one directed cycle as a vertex list, or None if acyclic."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in ids}
    stack: list[str] = []

    def dfs(v: str) -> list[str] | None:
        color[v] = GRAY
        stack.append(v)
        for w in succ[v]:
            if color[w] == GRAY:
                return stack[stack.index(w):]
            if color[w] == WHITE:
                cyc = dfs(w)
                if cyc is not None:
                    return cyc
        stack.pop()
        color[v] = BLACK
        return None

    for v in ids:
        if color[v] == WHITE:
            cyc = dfs(v)
            if cyc is not None:
                return cyc
    return None


def _path_via_intermediate(source: str, target: str,
                           succ: dict[str, list[str]]) -> list[str] | None:
    """Shortest source->target path with at least one intermediate vertex."""
    from collections import deque

    parents: dict[str, str] = {}
    queue = deque(w for w in succ[source] if w != target)
    for w in queue:
        parents.setdefault(w, source)
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if w == target:
                path = [target, v]
                while path[-1] != source:
                    path.append(parents[path[-1]])
                return list(reversed(path))
            if w not in parents:
                parents[w] = v
                queue.append(w)
    return None


def _validate_plan(plan: DegreePlan, ids: set[str],
                   requisites: list[Requisite], errors: list[str]) -> None:
    seen: dict[str, int] = {}
    for k, term in enumerate(plan.terms, 1):
        for cid in term:
            if cid not in ids:
                errors.append(f"plan {plan.name!r}: unknown course id {cid!r} in term {k}")
            elif cid in seen:
                errors.append(f"plan {plan.name!r}: course {cid!r} appears in terms "
                              f"{seen[cid]} and {k}")
            else:
                seen[cid] = k
    missing = sorted(ids - seen.keys())
    for cid in missing:
        errors.append(f"plan {plan.name!r}: course {cid!r} is not assigned to any term")
    if missing or any(cid not in ids for cid in seen):
        return
    for r in requisites:
        ts, tt = seen[r.source], seen[r.target]
        if r.kind == PREREQ and not ts < tt:
            errors.append(f"plan {plan.name!r}: prereq {r.source} -> {r.target} violated "
                          f"(terms {ts} and {tt})")
        elif r.kind == COREQ and not ts <= tt:
            errors.append(f"plan {plan.name!r}: coreq {r.source} -> {r.target} violated "
                          f"(terms {ts} and {tt})")
        elif r.kind == STRICT_COREQ and ts != tt:
            errors.append(f"plan {plan.name!r}: strict coreq {r.source} ~ {r.target} must "
                          f"share a term (terms {ts} and {tt})")


def build_curriculum(name: str, courses, requisites=(), plans=()) -> Curriculum | ValidationReport:
    """Validate and build a curriculum.

    Returns a `Curriculum`, or a `ValidationReport` carrying every error found
    (cycles, duplicate/unknown/malformed ids, invalid plans). Redundant
    forward edges are reported as warnings on the built curriculum's report
    and never block construction; fetch them with `validation_warnings`.
    """
    report = ValidationReport()
    course_list = [c if isinstance(c, Course) else Course(**c) for c in courses]

    seen_ids: set[str] = set()
    for c in course_list:
        if not c.id or any(ch.isspace() for ch in c.id):
            report.errors.append(f"course id {c.id!r} must be a non-empty token without whitespace")
        if c.id in seen_ids:
            report.errors.append(f"duplicate course id: {c.id!r}")
        seen_ids.add(c.id)
        if c.credits < 0:
            report.errors.append(f"course {c.id!r}: credits must be >= 0 (got {c.credits})")

    ids = {c.id for c in course_list}
    kept: list[Requisite] = []
    seen_pairs: dict[tuple[str, str], str] = {}
    for i, r in enumerate(requisites):
        if not isinstance(r, Requisite):
            r = Requisite(**r)
        if r.kind not in REQUISITE_KINDS:
            report.errors.append(f"requisite {i} ({r.source} -> {r.target}): "
                                 f"unknown kind {r.kind!r}")
            continue
        if r.source == r.target:
            report.errors.append(f"requisite {i}: self-requisite on {r.source!r}")
            continue
        bad_ref = False
        for cid in (r.source, r.target):
            if cid not in ids:
                report.errors.append(f"requisite {i} ({r.source} -> {r.target}): "
                                     f"unknown course id {cid!r}")
                bad_ref = True
        if bad_ref:
            continue
        if (r.source, r.target) in seen_pairs:
            report.warnings.append(f"duplicate requisite {r.source} -> {r.target} ignored")
            continue
        if r.kind == STRICT_COREQ and seen_pairs.get((r.target, r.source)) == STRICT_COREQ:
            report.warnings.append(f"mirrored strict coreq {r.source} ~ {r.target} stored once")
            continue
        seen_pairs[(r.source, r.target)] = r.kind
        kept.append(r)

    if report.errors:
        return report

    id_list = [c.id for c in course_list]
    succ: dict[str, list[str]] = {v: [] for v in id_list}
    for r in kept:
        succ[r.source].append(r.target)
    cycle = _find_cycle(id_list, succ)
    if cycle is not None:
        report.errors.append("cycle detected: " + " -> ".join(cycle + [cycle[0]]))
        return report

    # Redundant forward edges: a longer path already implies the edge, unless
    # the endpoints are directly coreq-related.
    coreq_related = {(r.source, r.target) for r in kept if r.kind != PREREQ}
    coreq_related |= {(b, a) for a, b in coreq_related}
    for r in kept:
        if (r.source, r.target) in coreq_related:
            continue
        path = _path_via_intermediate(r.source, r.target, succ)
        if path is not None:
            report.warnings.append(f"forward edge {r.source} -> {r.target} "
                                   f"(implied by {' -> '.join(path)})")

    plan_list = [p if isinstance(p, DegreePlan) else DegreePlan.of(p["name"], p["terms"])
                 for p in plans]
    plan_names: set[str] = set()
    for p in plan_list:
        if p.name in plan_names:
            report.errors.append(f"duplicate plan name: {p.name!r}")
        plan_names.add(p.name)
        _validate_plan(p, ids, kept, report.errors)
    if report.errors:
        return report

    curriculum = Curriculum(name, tuple(course_list), tuple(kept), tuple(plan_list))
    curriculum.validation_warnings = tuple(report.warnings)
    return curriculum


# -- graph operations -------------------------------------------------------


def reachable_set(c: Curriculum, course_id: str, direction: str = FORWARD) -> set[str]:
    """All courses reachable from `course_id` along requisite edges.

    `forward` follows edges source->target (courses this one eventually
    unlocks); `backward` follows them in reverse (courses required, directly
    or transitively, before this one). The start course is excluded. Coreq
    and strict-coreq edges traverse exactly like prereq edges.
    """
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}, got {direction!r}")
    c.course(course_id)
    step = c._succ if direction == FORWARD else c._pred
    seen: set[str] = set()
    stack = list(step[course_id])
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(step[v])
    return seen


def topological_order(c: Curriculum) -> list[str]:
    """Requisite-respecting course order, ties broken by course id."""
    indeg = {v: len(c._pred[v]) for v in c._by_id}
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order: list[str] = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in c._succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return order


def weakly_connected_components(c: Curriculum) -> list[list[str]]:
    """Course ids grouped by weakly connected component, deterministic order."""
    parent = {v: v for v in c._by_id}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for r in c.requisites:
        a, b = find(r.source), find(r.target)
        if a != b:
            parent[a] = b
    groups: dict[str, list[str]] = {}
    for cid in c.course_ids():
        groups.setdefault(find(cid), []).append(cid)
    return sorted(groups.values(), key=lambda g: g[0])


# -- edits -------------------------------------------------------------------


def apply_edit(c: Curriculum, edit: Edit) -> Curriculum | ValidationReport:
    """Apply one edit, returning a new validated curriculum.

    The original curriculum is never mutated; an edit whose result fails
    validation is rejected atomically with the report.
    """
    courses = list(c.courses)
    requisites = list(c.requisites)
    plans = list(c.plans)

    if edit.op == "add_course":
        if edit.course is None:
            return ValidationReport(errors=["add_course edit carries no course"])
        courses.append(edit.course)
    elif edit.op == "remove_course":
        cid = edit.course_id
        if cid not in c:
            return ValidationReport(errors=[f"unknown course id: {cid!r}"])
        courses = [x for x in courses if x.id != cid]
        requisites = [r for r in requisites if cid not in (r.source, r.target)]
        plans = [DegreePlan(p.name, tuple(tuple(x for x in term if x != cid)
                                          for term in p.terms)) for p in plans]
    elif edit.op == "add_requisite":
        if edit.requisite is None:
            return ValidationReport(errors=["add_requisite edit carries no requisite"])
        requisites.append(edit.requisite)
    elif edit.op == "remove_requisite":
        r = edit.requisite
        any_kind = edit.course_id == "*any*"
        matches = [x for x in requisites
                   if x.source == r.source and x.target == r.target
                   and (any_kind or x.kind == r.kind)]
        if not matches:
            return ValidationReport(errors=[f"no requisite {r.source} -> {r.target} to remove"])
        requisites = [x for x in requisites if x not in matches]
    elif edit.op == "move_course":
        try:
            plan = c.plan(edit.plan)
        except KeyError as e:
            return ValidationReport(errors=[str(e)])
        if edit.course_id not in c:
            return ValidationReport(errors=[f"unknown course id: {edit.course_id!r}"])
        if edit.term is None or edit.term < 1:
            return ValidationReport(errors=[f"move_course: term must be >= 1, got {edit.term}"])
        terms = [list(t) for t in plan.terms]
        for t in terms:
            if edit.course_id in t:
                t.remove(edit.course_id)
        while len(terms) < edit.term:
            terms.append([])
        terms[edit.term - 1].append(edit.course_id)
        moved = DegreePlan.of(plan.name, terms)
        plans = [moved if p.name == plan.name else p for p in plans]
    else:
        return ValidationReport(errors=[f"unknown edit op: {edit.op!r}"])

    return build_curriculum(c.name, courses, requisites, plans)


def apply_edits(c: Curriculum, edits) -> Curriculum | ValidationReport:
    """Apply a sequence of edits atomically: first failure rejects the lot."""
    current = c
    for e in edits:
        result = apply_edit(current, e)
        if isinstance(result, ValidationReport):
            return result
        current = result
    return current
