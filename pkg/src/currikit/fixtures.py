"""Canonical small curricula used across tests, docs, and the CLI demos.

EMPTY4 and FIG4B..FIG4G are the seven balanced two-term four-course shapes
(in increasing structural complexity 4, 7, 9, 9, 10, 11, 12). C1 and C2 are
two three-term four-course examples, CHAIN4/CHAIN5/ENGR5 the calculus-gated
design patterns (complexities 22, 35, 25).
"""

from __future__ import annotations

from .model import Course, Curriculum, DegreePlan, Requisite, build_curriculum


def _build(name: str, course_ids, edges, plan_terms, names=None) -> Curriculum:
    names = names or {}
    courses = [Course(cid, names.get(cid, cid)) for cid in course_ids]
    requisites = [Requisite(s, t) for s, t in edges]
    plans = [DegreePlan.of("default", plan_terms)]
    built = build_curriculum(name, courses, requisites, plans)
    assert isinstance(built, Curriculum), built
    return built


_V4 = ["v1", "v2", "v3", "v4"]
_TWO_TERM = [["v1", "v2"], ["v3", "v4"]]


def empty4() -> Curriculum:
    """Four standalone courses over two terms (complexity 4)."""
    return _build("empty4", _V4, [], _TWO_TERM)


def fig4b() -> Curriculum:
    return _build("fig4b", _V4, [("v1", "v3")], _TWO_TERM)


def fig4c() -> Curriculum:
    return _build("fig4c", _V4, [("v1", "v3"), ("v2", "v3")], _TWO_TERM)


def fig4d() -> Curriculum:
    return _build("fig4d", _V4, [("v1", "v3"), ("v1", "v4")], _TWO_TERM)


def fig4e() -> Curriculum:
    return _build("fig4e", _V4, [("v1", "v3"), ("v2", "v4")], _TWO_TERM)


def fig4f() -> Curriculum:
    return _build("fig4f", _V4, [("v1", "v3"), ("v1", "v4"), ("v2", "v4")], _TWO_TERM)


def fig4g() -> Curriculum:
    return _build("fig4g", _V4,
                  [("v1", "v3"), ("v1", "v4"), ("v2", "v3"), ("v2", "v4")], _TWO_TERM)


def c1() -> Curriculum:
    """Branching three-term example: v1 -> v2 -> v4 with a v1 -> v3 spur."""
    return _build("c1", _V4, [("v1", "v2"), ("v2", "v4"), ("v1", "v3")],
                  [["v1"], ["v2", "v3"], ["v4"]])


def c2() -> Curriculum:
    """Fan-out three-term example: v1 -> v2, then v2 -> v3 and v2 -> v4."""
    return _build("c2", _V4, [("v1", "v2"), ("v2", "v3"), ("v2", "v4")],
                  [["v1"], ["v2"], ["v3", "v4"]])


_PATTERN_NAMES = {
    "Precalculus": "Precalculus",
    "CalcI": "Calculus I",
    "CalcII": "Calculus II",
    "DiffEq": "Differential Equations",
    "Disciplinary": "Disciplinary Course",
    "Engr101": "Engineering 101",
}


def chain4() -> Curriculum:
    """Calculus-ready gate pattern: a four-course chain (complexity 22)."""
    ids = ["CalcI", "CalcII", "DiffEq", "Disciplinary"]
    return _build("calculus-gated", ids,
                  [("CalcI", "CalcII"), ("CalcII", "DiffEq"), ("DiffEq", "Disciplinary")],
                  [[c] for c in ids], _PATTERN_NAMES)


def chain5() -> Curriculum:
    """The common remedy: Precalculus prepended to the chain (complexity 35)."""
    ids = ["Precalculus", "CalcI", "CalcII", "DiffEq", "Disciplinary"]
    return _build("precalculus-prepended", ids,
                  [("Precalculus", "CalcI"), ("CalcI", "CalcII"),
                   ("CalcII", "DiffEq"), ("DiffEq", "Disciplinary")],
                  [[c] for c in ids], _PATTERN_NAMES)


def engr5() -> Curriculum:
    """First-year-engineering redesign: the intro course gates both tracks
    (complexity 25)."""
    ids = ["Engr101", "CalcI", "CalcII", "DiffEq", "Disciplinary"]
    return _build("firstyear-redesign", ids,
                  [("Engr101", "CalcI"), ("CalcI", "CalcII"),
                   ("CalcII", "DiffEq"), ("Engr101", "Disciplinary")],
                  [["Engr101"], ["CalcI", "Disciplinary"], ["CalcII"], ["DiffEq"]],
                  _PATTERN_NAMES)


def fig4_series() -> list[Curriculum]:
    """The seven balanced (4, 2) shapes in increasing complexity order."""
    return [empty4(), fig4b(), fig4c(), fig4d(), fig4e(), fig4f(), fig4g()]


ALL = {
    "empty4": empty4,
    "fig4b": fig4b,
    "fig4c": fig4c,
    "fig4d": fig4d,
    "fig4e": fig4e,
    "fig4f": fig4f,
    "fig4g": fig4g,
    "c1": c1,
    "c2": c2,
    "chain4": chain4,
    "chain5": chain5,
    "engr5": engr5,
}
