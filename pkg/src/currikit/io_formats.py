"""Parsing and serialization for curriculum files, pass-rate tables, and DOT.

The curriculum file is versioned JSON (`format_version: "1"`) with `courses`
(`id`, `name`, `credits`, optional `canonical`), `requisites` (`from`, `to`,
`type` in prereq/coreq/strictcoreq), and `plans` (`name`, `terms`).
Serialization is canonical -- courses sorted by id, requisites by
(from, to, type), plans by name -- so equal curricula produce byte-identical
files. Unknown fields are rejected unless parsing leniently.
"""

from __future__ import annotations

import json

from .metrics import MetricsReport, curriculum_metrics
from .model import (COREQ, PREREQ, STRICT_COREQ, Course, Curriculum, DegreePlan,
                    Edit, Requisite, ValidationReport, build_curriculum,
                    reachable_set)
from .planner import PlanProfile
from .simulation import PassRateTable

FORMAT_VERSION = "1"

_KIND_TO_FILE = {PREREQ: "prereq", COREQ: "coreq", STRICT_COREQ: "strictcoreq"}
_FILE_TO_KIND = {v: k for k, v in _KIND_TO_FILE.items()}

_TOP_FIELDS = {"format_version", "name", "courses", "requisites", "plans"}
_COURSE_FIELDS = {"id", "name", "credits", "canonical"}
_REQUISITE_FIELDS = {"from", "to", "type"}
_PLAN_FIELDS = {"name", "terms"}


def _check_fields(obj: dict, allowed: set[str], where: str, lenient: bool,
                  errors: list[str], warnings: list[str]) -> None:
    unknown = sorted(set(obj) - allowed)
    for field in unknown:
        message = f"{where}: unknown field {field!r}"
        (warnings if lenient else errors).append(message)


def parse_curriculum(text: str, lenient: bool = False) -> Curriculum | ValidationReport:
    """Parse a curriculum document, aggregating every finding with context."""
    errors: list[str] = []
    warnings: list[str] = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        return ValidationReport(errors=[f"syntax error: {e}"])
    if not isinstance(doc, dict):
        return ValidationReport(errors=["document must be a JSON object"])

    _check_fields(doc, _TOP_FIELDS, "document", lenient, errors, warnings)
    version = doc.get("format_version")
    if version is None:
        errors.append("missing format_version")
    elif version != FORMAT_VERSION:
        errors.append(f"unknown format_version {version!r} (expected {FORMAT_VERSION!r})")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        errors.append("name must be a non-empty string")
        name = ""

    courses: list[Course] = []
    raw_courses = doc.get("courses", [])
    if not isinstance(raw_courses, list):
        errors.append("courses must be a list")
        raw_courses = []
    for i, raw in enumerate(raw_courses):
        where = f"courses[{i}]"
        if not isinstance(raw, dict):
            errors.append(f"{where}: must be an object")
            continue
        _check_fields(raw, _COURSE_FIELDS, where, lenient, errors, warnings)
        cid = raw.get("id")
        if not isinstance(cid, str) or not cid:
            errors.append(f"{where}: missing required field 'id'")
            continue
        credits = raw.get("credits", 3)
        if not isinstance(credits, (int, float)) or isinstance(credits, bool):
            errors.append(f"{where} ({cid}): credits must be a number")
            credits = 3
        canonical = raw.get("canonical")
        if canonical is not None and not isinstance(canonical, str):
            errors.append(f"{where} ({cid}): canonical must be a string")
            canonical = None
        course_name = raw.get("name", "")
        if not isinstance(course_name, str):
            errors.append(f"{where} ({cid}): name must be a string")
            course_name = ""
        courses.append(Course(cid, course_name, float(credits), canonical))

    requisites: list[Requisite] = []
    raw_reqs = doc.get("requisites", [])
    if not isinstance(raw_reqs, list):
        errors.append("requisites must be a list")
        raw_reqs = []
    for i, raw in enumerate(raw_reqs):
        where = f"requisites[{i}]"
        if not isinstance(raw, dict):
            errors.append(f"{where}: must be an object")
            continue
        _check_fields(raw, _REQUISITE_FIELDS, where, lenient, errors, warnings)
        src, dst = raw.get("from"), raw.get("to")
        if not isinstance(src, str) or not isinstance(dst, str):
            errors.append(f"{where}: 'from' and 'to' are required strings")
            continue
        kind_name = raw.get("type", "prereq")
        kind = _FILE_TO_KIND.get(kind_name)
        if kind is None:
            errors.append(f"{where} ({src} -> {dst}): bad requisite type {kind_name!r}")
            continue
        requisites.append(Requisite(src, dst, kind))

    plans: list[DegreePlan] = []
    raw_plans = doc.get("plans", [])
    if not isinstance(raw_plans, list):
        errors.append("plans must be a list")
        raw_plans = []
    for i, raw in enumerate(raw_plans):
        where = f"plans[{i}]"
        if not isinstance(raw, dict):
            errors.append(f"{where}: must be an object")
            continue
        _check_fields(raw, _PLAN_FIELDS, where, lenient, errors, warnings)
        plan_name = raw.get("name")
        terms = raw.get("terms")
        if not isinstance(plan_name, str) or not plan_name:
            errors.append(f"{where}: missing required field 'name'")
            continue
        if (not isinstance(terms, list)
                or any(not isinstance(t, list) for t in terms)
                or any(not isinstance(x, str) for t in terms for x in t)):
            errors.append(f"{where} ({plan_name}): terms must be a list of lists of course ids")
            continue
        plans.append(DegreePlan.of(plan_name, terms))

    if errors:
        return ValidationReport(errors=errors, warnings=warnings)
    built = build_curriculum(name, courses, requisites, plans)
    if isinstance(built, ValidationReport):
        built.warnings = warnings + built.warnings
        return built
    built.validation_warnings = tuple(warnings) + built.validation_warnings
    return built


def curriculum_to_dict(c: Curriculum) -> dict:
    """The canonical document form of a curriculum."""
    def number(x: float):
        return int(x) if float(x).is_integer() else x

    courses = []
    for course in sorted(c.courses, key=lambda x: x.id):
        entry = {"id": course.id, "name": course.name, "credits": number(course.credits)}
        if course.canonical_name is not None:
            entry["canonical"] = course.canonical_name
        courses.append(entry)
    requisites = [
        {"from": r.source, "to": r.target, "type": _KIND_TO_FILE[r.kind]}
        for r in sorted(c.requisites, key=lambda r: (r.source, r.target, r.kind))
    ]
    plans = [{"name": p.name, "terms": [list(t) for t in p.terms]}
             for p in sorted(c.plans, key=lambda p: p.name)]
    return {
        "format_version": FORMAT_VERSION,
        "name": c.name,
        "courses": courses,
        "requisites": requisites,
        "plans": plans,
    }


def serialize_curriculum(c: Curriculum) -> str:
    return json.dumps(curriculum_to_dict(c), indent=2, ensure_ascii=False) + "\n"


def parse_pass_rates(text: str) -> PassRateTable | ValidationReport:
    """Parse a pass-rate file: {"default": p, "overrides": {course id: p}}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        return ValidationReport(errors=[f"syntax error: {e}"])
    if not isinstance(doc, dict):
        return ValidationReport(errors=["document must be a JSON object"])
    errors: list[str] = []
    unknown = sorted(set(doc) - {"default", "overrides"})
    for field in unknown:
        errors.append(f"document: unknown field {field!r}")
    default = doc.get("default", 0.5)
    overrides = doc.get("overrides", {})
    if not isinstance(default, (int, float)) or isinstance(default, bool):
        errors.append("default must be a number")
        default = 0.5
    if not isinstance(overrides, dict):
        errors.append("overrides must be an object mapping course id to rate")
        overrides = {}
    for cid, value in overrides.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            errors.append(f"overrides[{cid!r}]: must be a number")
    if errors:
        return ValidationReport(errors=errors)
    try:
        return PassRateTable(float(default), {k: float(v) for k, v in overrides.items()})
    except ValueError as e:
        return ValidationReport(errors=[str(e)])


# -- DOT export ---------------------------------------------------------------


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(c: Curriculum, cluster_by_plan: str | None = None,
               highlight_longest_paths: bool = False,
               shade_blocked_by: str | None = None) -> str:
    """Render the curriculum as a DOT digraph.

    Nodes are labeled "id\\nname (complexity)". With `cluster_by_plan`, each
    term of the named plan becomes a `term_<k>` cluster. Longest-path edges
    come out bold; the set blocked by `shade_blocked_by` comes out filled.
    """
    report = curriculum_metrics(c)
    cx = {m.course_id: m.complexity for m in report.courses}
    blocked: set[str] = set()
    if shade_blocked_by is not None:
        blocked = reachable_set(c, shade_blocked_by, "forward")
    bold_edges: set[tuple[str, str]] = set()
    if highlight_longest_paths:
        for path in report.longest_paths:
            bold_edges.update(zip(path, path[1:]))

    def node_line(course: Course) -> str:
        label = f"{course.id}\\n{course.name} ({cx[course.id]})"
        attrs = [f"label={_dot_quote(label)}"]
        if course.id in blocked:
            attrs.append("style=filled")
            attrs.append("fillcolor=gray85")
        return f"  {_dot_quote(course.id)} [{', '.join(attrs)}];"

    lines = [f"digraph {_dot_quote(c.name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    if cluster_by_plan is not None:
        plan = c.plan(cluster_by_plan)
        for k, term in enumerate(plan.terms, 1):
            lines.append(f"  subgraph {_dot_quote(f'cluster_term_{k}')} {{")
            lines.append(f"    label={_dot_quote(f'term_{k}')};")
            for cid in term:
                lines.append("  " + node_line(c.course(cid)))
            lines.append("  }")
    else:
        for course in c.courses:
            lines.append(node_line(course))

    for r in sorted(c.requisites, key=lambda r: (r.source, r.target, r.kind)):
        attrs = []
        if r.kind == COREQ:
            attrs.append("style=dashed")
        elif r.kind == STRICT_COREQ:
            attrs.append("style=dotted")
            attrs.append("dir=both")
        if (r.source, r.target) in bold_edges:
            attrs = [a for a in attrs if not a.startswith("style=")]
            attrs.insert(0, "style=bold")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_dot_quote(r.source)} -> {_dot_quote(r.target)}{suffix};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- wire helpers (service and machine-format CLI output) ---------------------


def metrics_to_dict(report: MetricsReport) -> dict:
    return {
        "courses": [
            {"id": m.course_id, "delay": m.delay, "blocking": m.blocking,
             "reachability": m.reachability, "centrality": m.centrality,
             "complexity": m.complexity}
            for m in report.courses
        ],
        "totals": {"delay": report.delay, "blocking": report.blocking,
                   "reachability": report.reachability,
                   "complexity": report.complexity},
        "longest_paths": [list(p) for p in report.longest_paths],
        "longest_path_length": report.longest_path_length,
    }


def profile_to_dict(profile: PlanProfile) -> dict:
    return {
        "term_credits": list(profile.term_credits),
        "term_complexity": list(profile.term_complexity),
        "max_term_complexity": profile.max_term_complexity,
        "complexity_variance": profile.complexity_variance,
        "total_credits": profile.total_credits,
        "total_complexity": profile.total_complexity,
    }


def report_to_dict(report: ValidationReport) -> dict:
    return {"errors": list(report.errors), "warnings": list(report.warnings)}


def edit_from_dict(doc: dict) -> Edit | ValidationReport:
    """Decode one edit operation from its wire form."""
    if not isinstance(doc, dict):
        return ValidationReport(errors=["edit must be an object"])
    op = doc.get("op")
    try:
        if op == "add_course":
            raw = doc.get("course")
            if not isinstance(raw, dict) or not isinstance(raw.get("id"), str):
                return ValidationReport(errors=["add_course: 'course' object with 'id' required"])
            return Edit.add_course(Course(raw["id"], raw.get("name", ""),
                                          float(raw.get("credits", 3)),
                                          raw.get("canonical")))
        if op == "remove_course":
            return Edit.remove_course(_require_str(doc, "course_id"))
        if op == "add_requisite":
            kind = _FILE_TO_KIND.get(doc.get("type", "prereq"))
            if kind is None:
                return ValidationReport(errors=[f"add_requisite: bad type {doc.get('type')!r}"])
            return Edit.add_requisite(_require_str(doc, "from"), _require_str(doc, "to"), kind)
        if op == "remove_requisite":
            kind_name = doc.get("type")
            kind = None if kind_name is None else _FILE_TO_KIND.get(kind_name)
            if kind_name is not None and kind is None:
                return ValidationReport(errors=[f"remove_requisite: bad type {kind_name!r}"])
            return Edit.remove_requisite(_require_str(doc, "from"), _require_str(doc, "to"), kind)
        if op == "move_course":
            term = doc.get("term")
            if not isinstance(term, int):
                return ValidationReport(errors=["move_course: integer 'term' required"])
            return Edit.move_course(_require_str(doc, "plan"),
                                    _require_str(doc, "course_id"), term)
    except KeyError as e:
        return ValidationReport(errors=[f"{op}: missing field {e.args[0]!r}"])
    return ValidationReport(errors=[f"unknown edit op: {op!r}"])


def _require_str(doc: dict, key: str) -> str:
    value = doc.get(key)
    if not isinstance(value, str):
        raise KeyError(key)
    return value
