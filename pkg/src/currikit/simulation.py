"""Cohort progression simulation under per-course pass rates.

Three modes with deliberately different fidelity:

* ``analytic``   -- per-course cumulative pass probabilities from a gated
  recurrence, with the graduation rate taken as the product of the per-course
  marginals. This reproduces the published per-term passage tables.
* ``monte_carlo`` -- per-student trajectories with independent Bernoulli
  passes and deterministic enrollment; the graduation rate is the joint
  probability that one student passes everything.
* ``exact``      -- the same per-student process evolved exactly as a
  distribution over passed-course subsets (small curricula only).

The analytic product overstates independence between marginals on gated
curricula, so analytic and exact/monte_carlo graduation rates legitimately
differ there; both are kept, clearly labeled by ``SimResult.mode``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .metrics import complexity_by_course
from .model import (COREQ, PREREQ, Curriculum, DegreePlan, topological_order,
                    weakly_connected_components)

ANALYTIC = "analytic"
MONTE_CARLO = "monte_carlo"
EXACT = "exact"
MODES = (ANALYTIC, MONTE_CARLO, EXACT)

EXACT_MAX_COURSES = 20
_PRIORITY_CRITERIA = ("plan_term", "complexity_desc", "complexity_asc", "id")
_MC_CHUNK = 8192  # fixed so results never depend on thread count


@dataclass(frozen=True)
class PassRateTable:
    """Default pass probability plus per-course overrides, all in [0, 1]."""

    default: float = 0.5
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        for label, value in [("default", self.default), *self.overrides.items()]:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"pass rate for {label!r} must be in [0, 1], got {value}")

    def rate(self, course_id: str) -> float:
        return self.overrides.get(course_id, self.default)

    @classmethod
    def uniform(cls, p: float) -> "PassRateTable":
        return cls(default=p)


@dataclass(frozen=True)
class EnrollmentPolicy:
    """Course-taking rules for simulated students.

    Students attempt every failed course again the next term (no stopping
    out). Beyond the degree plan's per-term load they may start
    ``extra_new_courses_per_term`` additional courses, chosen by ``priority``.
    With ``retakes_capped`` the per-term budget applies to all enrollment,
    retakes included, instead of only to the deterministic schedule of
    requisite-free courses.
    """

    extra_new_courses_per_term: int = 1
    retakes_capped: bool = False
    priority: tuple[str, ...] = ("plan_term", "complexity_desc", "id")
    stop_out_probability: float = 0.0

    def __post_init__(self):
        if self.extra_new_courses_per_term < 0:
            raise ValueError("extra_new_courses_per_term must be >= 0")
        if self.stop_out_probability != 0.0:
            raise ValueError("stop-out modeling is not supported; probability must be 0")
        for crit in self.priority:
            if crit not in _PRIORITY_CRITERIA:
                raise ValueError(f"unknown priority criterion {crit!r}")
        if "id" not in self.priority:
            object.__setattr__(self, "priority", tuple(self.priority) + ("id",))


@dataclass(frozen=True)
class SimulationConfig:
    horizon_terms: int
    mode: str = ANALYTIC
    plan: str = "default"
    rates: PassRateTable = field(default_factory=PassRateTable)
    policy: EnrollmentPolicy = field(default_factory=EnrollmentPolicy)
    students: int = 10_000
    seed: int = 0
    threads: int = 1


@dataclass(frozen=True)
class SimResult:
    """Per-course cumulative pass fractions (rows) and the grad-rate curve."""

    mode: str
    course_ids: tuple[str, ...]
    cumulative: np.ndarray  # shape (courses, horizon terms)
    grad_rate: tuple[float, ...]
    plan_length: int
    students: int | None = None
    seed: int | None = None
    grad_se: tuple[float, ...] | None = None

    def course_row(self, course_id: str) -> tuple[float, ...]:
        idx = self.course_ids.index(course_id)
        return tuple(self.cumulative[idx])

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "course_ids": list(self.course_ids),
            "cumulative": [[float(x) for x in row] for row in self.cumulative],
            "grad_rate": [float(g) for g in self.grad_rate],
            "plan_length": self.plan_length,
        }
        if self.mode == MONTE_CARLO:
            out["students"] = self.students
            out["seed"] = self.seed
            out["grad_se"] = [float(s) for s in self.grad_se]
        return out


def completion_at(result: SimResult, multiplier: float,
                  plan_length: int | None = None) -> float:
    """Graduation rate at ceil(multiplier * plan_length) terms."""
    length = result.plan_length if plan_length is None else plan_length
    term = math.ceil(multiplier * length)
    if term < 1:
        raise ValueError(f"multiplier {multiplier} yields term {term} < 1")
    if term > len(result.grad_rate):
        raise ValueError(f"term {term} exceeds simulated horizon {len(result.grad_rate)}")
    return result.grad_rate[term - 1]


# -- enrollment machinery ----------------------------------------------------


def _priority_order(c: Curriculum, plan: DegreePlan, policy: EnrollmentPolicy) -> list[str]:
    cx = complexity_by_course(c)
    plan_term = {cid: k for k, term in enumerate(plan.terms, 1) for cid in term}

    def key(cid: str):
        parts: list = []
        for crit in policy.priority:
            if crit == "plan_term":
                parts.append(plan_term[cid])
            elif crit == "complexity_desc":
                parts.append(-cx[cid])
            elif crit == "complexity_asc":
                parts.append(cx[cid])
            else:
                parts.append(cid)
        return tuple(parts)

    return sorted(c.course_ids(), key=key)


def _term_budget(plan: DegreePlan, policy: EnrollmentPolicy, t: int) -> int:
    load = len(plan.terms[t - 1]) if t <= len(plan.terms) else 0
    return load + policy.extra_new_courses_per_term


def first_attempt_schedule(c: Curriculum, plan: DegreePlan,
                           policy: EnrollmentPolicy | None = None) -> dict[str, int]:
    """Earliest term each course can first be attempted.

    Requisite-free courses are slotted deterministically, filling each term's
    plan load plus the policy's extra new-course allowance in priority order.
    Gated courses get their gate semantics: the term after all prereqs pass
    (same term as coreqs), assuming first attempts succeed.
    """
    policy = policy or EnrollmentPolicy()
    order = _priority_order(c, plan, policy)
    queue = [v for v in order if not c._pred[v]]
    sched: dict[str, int] = {}
    t = 1
    while queue:
        if t > len(plan.terms) + len(c) + 1:
            raise RuntimeError("first-attempt scheduling failed to terminate")
        budget = _term_budget(plan, policy, t)
        for v in queue[:budget]:
            sched[v] = t
        queue = queue[budget:]
        t += 1
    for v in topological_order(c):
        if not c._pred[v]:
            continue
        gate = 1
        for r in c.predecessor_requisites(v):
            at = sched[r.source] + (1 if r.kind == PREREQ else 0)
            gate = max(gate, at)
        sched[v] = gate
    return sched


# -- analytic ----------------------------------------------------------------


def _simulate_analytic(c: Curriculum, plan: DegreePlan, cfg: SimulationConfig) -> SimResult:
    horizon = cfg.horizon_terms
    sched = first_attempt_schedule(c, plan, cfg.policy)
    cumulative: dict[str, list[float]] = {}
    for v in topological_order(c):
        p = cfg.rates.rate(v)
        reqs = c.predecessor_requisites(v)
        if not reqs:
            gate = [0.0] * (horizon + 1)
            for tau in range(sched[v], horizon + 1):
                gate[tau] = 1.0
        else:
            # Gate-open cumulative: prereqs must be passed by the previous
            # term, coreqs by the same term (independence approximation).
            gate = [0.0] * (horizon + 1)
            for tau in range(1, horizon + 1):
                g = 1.0
                for r in reqs:
                    prior = cumulative[r.source]
                    g *= prior[tau - 1] if r.kind == PREREQ else prior[tau]
                gate[tau] = g
        q = 1.0 - p
        row = [0.0] * (horizon + 1)
        for t in range(1, horizon + 1):
            total = 0.0
            for tau in range(1, t + 1):
                mass = gate[tau] - gate[tau - 1]
                if mass > 0.0:
                    total += mass * (1.0 - q ** (t - tau + 1))
            row[t] = total
        cumulative[v] = row

    ids = tuple(c.course_ids())
    matrix = np.array([cumulative[v][1:] for v in ids], dtype=float)
    grad = tuple(float(np.prod(matrix[:, t])) for t in range(horizon))
    return SimResult(ANALYTIC, ids, matrix, grad, plan_length=len(plan.terms))


# -- shared per-student enrollment semantics ---------------------------------


class _EnrollmentModel:
    """Deterministic enrollment as a function of (passed set, term) only."""

    def __init__(self, c: Curriculum, plan: DegreePlan, policy: EnrollmentPolicy):
        self.ids = list(c.course_ids())
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.topo = [self.index[v] for v in topological_order(c)]
        sched = first_attempt_schedule(c, plan, policy)
        self.start_term = [sched[v] for v in self.ids]
        self.prereqs: list[list[int]] = [[] for _ in self.ids]
        self.coreqs: list[list[int]] = [[] for _ in self.ids]
        for r in c.requisites:
            bucket = self.prereqs if r.kind == PREREQ else self.coreqs
            bucket[self.index[r.target]].append(self.index[r.source])
        self.gated = [bool(self.prereqs[i] or self.coreqs[i]) for i in range(len(self.ids))]
        self.policy = policy
        self.plan = plan
        rank_order = _priority_order(c, plan, policy)
        self.priority_rank = [rank_order.index(v) for v in self.ids]

    def eligible_mask(self, passed: int, t: int) -> int:
        """Bitmask of courses a student with `passed` may take in term `t`."""
        out = 0
        for i in self.topo:
            if passed >> i & 1:
                continue
            if not self.gated[i]:
                if t >= self.start_term[i]:
                    out |= 1 << i
                continue
            if any(not passed >> u & 1 for u in self.prereqs[i]):
                continue
            if any(not ((passed >> u & 1) or (out >> u & 1)) for u in self.coreqs[i]):
                continue
            out |= 1 << i
        return out

    def enrollment_mask(self, passed: int, t: int) -> int:
        mask = self.eligible_mask(passed, t)
        if not self.policy.retakes_capped:
            return mask
        budget = _term_budget(self.plan, self.policy, t)
        chosen = 0
        for i in sorted(range(len(self.ids)), key=lambda i: self.priority_rank[i]):
            if budget == 0:
                break
            if mask >> i & 1:
                chosen |= 1 << i
                budget -= 1
        return chosen


# -- exact -------------------------------------------------------------------


def _exact_component(model: _EnrollmentModel, members: list[int],
                     rates: list[float], horizon: int):
    """Evolve one weakly connected component's subset distribution term by term.

    Returns (per-course cumulative rows for `members`, completion-by-term).
    """
    local = {g: i for i, g in enumerate(members)}
    full = (1 << len(members)) - 1
    dist: dict[int, float] = {0: 1.0}
    rows = np.zeros((len(members), horizon))
    done = [0.0] * horizon
    for t in range(1, horizon + 1):
        new: dict[int, float] = defaultdict(float)
        for state, mass in dist.items():
            passed_global = 0
            for g in members:
                if state >> local[g] & 1:
                    passed_global |= 1 << g
            enrolled = model.enrollment_mask(passed_global, t)
            outcomes = [(state, mass)]
            for g in members:
                if not enrolled >> g & 1:
                    continue
                p = rates[g]
                nxt = []
                for s, m in outcomes:
                    if p > 0.0:
                        nxt.append((s | (1 << local[g]), m * p))
                    if p < 1.0:
                        nxt.append((s, m * (1.0 - p)))
                outcomes = nxt
            for s, m in outcomes:
                new[s] += m
        dist = dict(new)
        done[t - 1] = dist.get(full, 0.0)
        for g in members:
            rows[local[g], t - 1] = sum(m for s, m in dist.items() if s >> local[g] & 1)
    return rows, done


def _simulate_exact(c: Curriculum, plan: DegreePlan, cfg: SimulationConfig) -> SimResult:
    model = _EnrollmentModel(c, plan, cfg.policy)
    horizon = cfg.horizon_terms
    n = len(model.ids)
    rates = [cfg.rates.rate(v) for v in model.ids]
    matrix = np.zeros((n, horizon))
    grad = np.ones(horizon)
    if cfg.policy.retakes_capped:
        # A shared enrollment budget couples components; evolve jointly.
        groups = [[i for i in range(n)]] if n else []
    else:
        groups = [[model.index[v] for v in comp]
                  for comp in weakly_connected_components(c)]
    for members in groups:
        rows, done = _exact_component(model, members, rates, horizon)
        for k, g in enumerate(members):
            matrix[g] = rows[k]
        grad *= np.array(done)
    return SimResult(EXACT, tuple(model.ids), matrix, tuple(float(g) for g in grad),
                     plan_length=len(plan.terms))


# -- monte carlo ---------------------------------------------------------------


def _mc_chunk(model: _EnrollmentModel, rates: np.ndarray, horizon: int,
              seed: int, chunk_index: int, size: int):
    """Simulate one fixed-size block of students on its own seeded stream."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk_index]))
    n = len(model.ids)
    passed = np.zeros((size, n), dtype=bool)
    course_counts = np.zeros((horizon, n), dtype=np.int64)
    grad_counts = np.zeros(horizon, dtype=np.int64)
    capped = model.policy.retakes_capped
    if capped:
        rank = np.argsort(np.array(model.priority_rank))
    for t in range(1, horizon + 1):
        # One draw per (student, course) every term keeps streams aligned
        # across policies and makes pass-rate monotonicity a true coupling.
        draws = rng.random((size, n))
        enrolled = np.zeros((size, n), dtype=bool)
        for i in model.topo:
            if not model.gated[i]:
                if t >= model.start_term[i]:
                    enrolled[:, i] = ~passed[:, i]
                continue
            ok = ~passed[:, i]
            for u in model.prereqs[i]:
                ok &= passed[:, u]
            for u in model.coreqs[i]:
                ok &= passed[:, u] | enrolled[:, u]
            enrolled[:, i] = ok
        if capped:
            budget = _term_budget(model.plan, model.policy, t)
            ranked = enrolled[:, rank]
            keep = ranked & (np.cumsum(ranked, axis=1) <= budget)
            enrolled[:, rank] = keep
        passed |= enrolled & (draws < rates)
        course_counts[t - 1] = passed.sum(axis=0)
        grad_counts[t - 1] = int(passed.all(axis=1).sum())
    return course_counts, grad_counts


def _simulate_mc(c: Curriculum, plan: DegreePlan, cfg: SimulationConfig) -> SimResult:
    model = _EnrollmentModel(c, plan, cfg.policy)
    horizon = cfg.horizon_terms
    n = len(model.ids)
    rates = np.array([cfg.rates.rate(v) for v in model.ids])
    total = cfg.students
    chunks = [(k, min(_MC_CHUNK, total - k * _MC_CHUNK))
              for k in range((total + _MC_CHUNK - 1) // _MC_CHUNK)]

    def run(args):
        k, size = args
        return _mc_chunk(model, rates, horizon, cfg.seed, k, size)

    if cfg.threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(run, chunks))
    else:
        results = [run(a) for a in chunks]

    course_counts = sum(r[0] for r in results)
    grad_counts = sum(r[1] for r in results)
    matrix = (course_counts.T / total).astype(float)
    grad = tuple(float(g) / total for g in grad_counts)
    se = tuple(math.sqrt(g * (1.0 - g) / total) for g in grad)
    return SimResult(MONTE_CARLO, tuple(model.ids), matrix, grad,
                     plan_length=len(plan.terms), students=total, seed=cfg.seed,
                     grad_se=se)


# -- entry point ---------------------------------------------------------------


def simulate(c: Curriculum, cfg: SimulationConfig) -> SimResult:
    """Run one simulation according to `cfg` and return the result curves."""
    if cfg.mode not in MODES:
        raise ValueError(f"unknown mode {cfg.mode!r}; expected one of {MODES}")
    plan = c.plan(cfg.plan)
    if cfg.horizon_terms < len(plan.terms):
        raise ValueError(f"horizon {cfg.horizon_terms} is shorter than the "
                         f"{len(plan.terms)}-term plan {plan.name!r}")
    if cfg.mode == EXACT and len(c) > EXACT_MAX_COURSES:
        raise ValueError(f"exact mode handles at most {EXACT_MAX_COURSES} courses, "
                         f"curriculum has {len(c)}")
    if cfg.mode == MONTE_CARLO and cfg.students < 1:
        raise ValueError("monte_carlo mode needs at least one student")
    if cfg.mode == ANALYTIC:
        return _simulate_analytic(c, plan, cfg)
    if cfg.mode == EXACT:
        return _simulate_exact(c, plan, cfg)
    return _simulate_mc(c, plan, cfg)


def with_uniform_rate(cfg: SimulationConfig, p: float) -> SimulationConfig:
    """Convenience: the same config with a flat pass rate everywhere."""
    return replace(cfg, rates=PassRateTable.uniform(p))
