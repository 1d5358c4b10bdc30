"""HTTP API over the curriculum store for the web UI.

Curricula live in an in-memory map guarded by a lock, optionally mirrored to
one canonical file per curriculum under a data directory. Writes bump a
per-curriculum revision; `PUT` requires the expected revision in an
`If-Match` header and answers 409 on staleness, so concurrent editors cannot
silently overwrite each other. What-if requests compute metrics before and
after a batch of edits on an immutable snapshot and never touch the store.
"""

from __future__ import annotations

import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import io_formats
from .metrics import curriculum_metrics
from .model import Curriculum, ValidationReport, apply_edits
from .planner import plan_profile
from .simulation import (ANALYTIC, EXACT, MONTE_CARLO, EnrollmentPolicy,
                         PassRateTable, SimulationConfig, simulate)

_MODES = {"analytic": ANALYTIC, "mc": MONTE_CARLO, "monte_carlo": MONTE_CARLO,
          "exact": EXACT}


@dataclass
class StoredCurriculum:
    id: str
    curriculum: Curriculum
    revision: int = 1
    created: float = field(default_factory=time.time)
    updated: float = field(default_factory=time.time)

    def summary(self) -> dict:
        return {
            "id": self.id,
            "name": self.curriculum.name,
            "revision": self.revision,
            "courses": len(self.curriculum),
            "requisites": len(self.curriculum.requisites),
            "plans": [p.name for p in self.curriculum.plans],
            "created": self.created,
            "updated": self.updated,
        }


class CurriculumStore:
    """Thread-safe id -> curriculum map with optional file persistence."""

    def __init__(self, data_dir: str | None = None):
        self._lock = threading.RLock()
        self._items: dict[str, StoredCurriculum] = {}
        self._data_dir = data_dir
        if data_dir:
            os.makedirs(data_dir, exist_ok=True)
            self._load_existing(data_dir)

    def _load_existing(self, data_dir: str) -> None:
        for entry in sorted(os.listdir(data_dir)):
            if not entry.endswith(".curriculum.json"):
                continue
            path = os.path.join(data_dir, entry)
            with open(path, "r", encoding="utf-8") as fh:
                parsed = io_formats.parse_curriculum(fh.read())
            if isinstance(parsed, Curriculum):
                cid = entry[:-len(".curriculum.json")]
                self._items[cid] = StoredCurriculum(cid, parsed)

    def _path(self, cid: str) -> str:
        return os.path.join(self._data_dir, f"{cid}.curriculum.json")

    def _persist(self, item: StoredCurriculum) -> None:
        if not self._data_dir:
            return
        tmp = self._path(item.id) + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(io_formats.serialize_curriculum(item.curriculum))
        os.replace(tmp, self._path(item.id))

    def list(self) -> list[dict]:
        with self._lock:
            return [item.summary() for item in
                    sorted(self._items.values(), key=lambda i: i.created)]

    def get(self, cid: str) -> StoredCurriculum | None:
        with self._lock:
            return self._items.get(cid)

    def create(self, curriculum: Curriculum) -> StoredCurriculum:
        with self._lock:
            cid = uuid.uuid4().hex[:12]
            while cid in self._items:
                cid = uuid.uuid4().hex[:12]
            item = StoredCurriculum(cid, curriculum)
            self._items[cid] = item
            self._persist(item)
            return item

    def replace(self, cid: str, curriculum: Curriculum,
                expected_revision: int) -> StoredCurriculum | None | str:
        """Returns the updated item, None if absent, or "conflict" on staleness."""
        with self._lock:
            item = self._items.get(cid)
            if item is None:
                return None
            if item.revision != expected_revision:
                return "conflict"
            item.curriculum = curriculum
            item.revision += 1
            item.updated = time.time()
            self._persist(item)
            return item

    def delete(self, cid: str) -> bool:
        with self._lock:
            item = self._items.pop(cid, None)
            if item is None:
                return False
            if self._data_dir:
                try:
                    os.remove(self._path(cid))
                except FileNotFoundError:
                    pass
            return True


def _report_response(report: ValidationReport, status: int) -> JSONResponse:
    return JSONResponse(io_formats.report_to_dict(report), status_code=status)


def _estimate_seconds(cfg: SimulationConfig, n_courses: int) -> float:
    """Rough pre-flight cost model used to reject oversized simulations."""
    if cfg.mode == MONTE_CARLO:
        return cfg.students * cfg.horizon_terms * max(n_courses, 1) / 3e7
    if cfg.mode == EXACT:
        return cfg.horizon_terms * (3 ** min(n_courses, 24)) / 3e6
    return 0.001


def create_app(data_dir: str | None = None, simulation_budget_seconds: float = 10.0,
               ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="currikit", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"], expose_headers=["ETag"])
    store = CurriculumStore(data_dir)
    app.state.store = store

    async def _parse_body_curriculum(request: Request):
        try:
            text = (await request.body()).decode("utf-8")
        except UnicodeDecodeError:
            return _report_response(ValidationReport(errors=["body must be UTF-8"]), 400)
        parsed = io_formats.parse_curriculum(text)
        if isinstance(parsed, ValidationReport):
            # Structural problems are malformed input; graph-level problems
            # (cycles, bad plans) are domain-invalid.
            domain = any("cycle" in e or "plan" in e for e in parsed.errors)
            return _report_response(parsed, 422 if domain else 400)
        return parsed

    def _document(item: StoredCurriculum) -> JSONResponse:
        payload = {
            "id": item.id,
            "revision": item.revision,
            "created": item.created,
            "updated": item.updated,
            "curriculum": io_formats.curriculum_to_dict(item.curriculum),
            "warnings": list(getattr(item.curriculum, "validation_warnings", ())),
        }
        return JSONResponse(payload, headers={"ETag": str(item.revision)})

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/curricula")
    def list_curricula():
        return store.list()

    @app.post("/api/curricula", status_code=201)
    async def create_curriculum(request: Request):
        parsed = await _parse_body_curriculum(request)
        if isinstance(parsed, JSONResponse):
            return parsed
        item = store.create(parsed)
        return JSONResponse({"id": item.id, "revision": item.revision},
                            status_code=201, headers={"ETag": str(item.revision)})

    @app.get("/api/curricula/{cid}")
    def get_curriculum(cid: str):
        item = store.get(cid)
        if item is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        return _document(item)

    @app.put("/api/curricula/{cid}")
    async def put_curriculum(cid: str, request: Request):
        if store.get(cid) is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        if_match = request.headers.get("If-Match")
        if if_match is None or not if_match.strip('"').isdigit():
            return _report_response(ValidationReport(
                errors=["PUT requires an If-Match header carrying the expected revision"]), 400)
        parsed = await _parse_body_curriculum(request)
        if isinstance(parsed, JSONResponse):
            return parsed
        result = store.replace(cid, parsed, int(if_match.strip('"')))
        if result is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        if result == "conflict":
            current = store.get(cid)
            return JSONResponse({"error": "stale revision",
                                 "revision": current.revision if current else None},
                                status_code=409)
        return _document(result)

    @app.delete("/api/curricula/{cid}", status_code=204)
    def delete_curriculum(cid: str):
        if not store.delete(cid):
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        return Response(status_code=204)

    @app.get("/api/curricula/{cid}/metrics")
    def get_metrics(cid: str):
        item = store.get(cid)
        if item is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        payload = io_formats.metrics_to_dict(curriculum_metrics(item.curriculum))
        payload["revision"] = item.revision
        return JSONResponse(payload, headers={"ETag": str(item.revision)})

    @app.post("/api/curricula/{cid}/whatif")
    async def whatif(cid: str, request: Request):
        item = store.get(cid)
        if item is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        try:
            body = await request.json()
        except Exception:
            return _report_response(ValidationReport(errors=["body must be JSON"]), 400)
        raw_edits = body.get("edits") if isinstance(body, dict) else None
        if not isinstance(raw_edits, list) or not raw_edits:
            return _report_response(ValidationReport(
                errors=["body must carry a non-empty 'edits' list"]), 400)
        edits = []
        for i, raw in enumerate(raw_edits):
            decoded = io_formats.edit_from_dict(raw)
            if isinstance(decoded, ValidationReport):
                decoded.errors = [f"edits[{i}]: {e}" for e in decoded.errors]
                return _report_response(decoded, 400)
            edits.append(decoded)
        before = item.curriculum
        after = apply_edits(before, edits)
        if isinstance(after, ValidationReport):
            return _report_response(after, 422)
        before_metrics = curriculum_metrics(before)
        after_metrics = curriculum_metrics(after)
        cx_before = {m.course_id: m.complexity for m in before_metrics.courses}
        cx_after = {m.course_id: m.complexity for m in after_metrics.courses}
        deltas = []
        for course_id in sorted(set(cx_before) | set(cx_after)):
            b, a = cx_before.get(course_id), cx_after.get(course_id)
            if b != a:
                deltas.append({"id": course_id, "before": b, "after": a,
                               "delta": (a or 0) - (b or 0)})
        return {
            "revision": item.revision,
            "before": io_formats.metrics_to_dict(before_metrics),
            "after": io_formats.metrics_to_dict(after_metrics),
            "complexity_delta": after_metrics.complexity - before_metrics.complexity,
            "per_course_deltas": deltas,
            "warnings": list(getattr(after, "validation_warnings", ())),
            "curriculum": io_formats.curriculum_to_dict(after),
        }

    @app.post("/api/curricula/{cid}/simulate")
    async def run_simulation(cid: str, request: Request):
        item = store.get(cid)
        if item is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        try:
            body = await request.json()
        except Exception:
            return _report_response(ValidationReport(errors=["body must be JSON"]), 400)
        if not isinstance(body, dict):
            return _report_response(ValidationReport(errors=["body must be an object"]), 400)
        errors = []
        mode = _MODES.get(body.get("mode", "analytic"))
        if mode is None:
            errors.append(f"unknown mode {body.get('mode')!r}")
        plan_name = body.get("plan", "default")
        horizon = body.get("horizon_terms")
        if not isinstance(horizon, int) or horizon < 1:
            errors.append("horizon_terms must be a positive integer")
        rates_doc = body.get("pass_rates", {"default": 0.5})
        rates: PassRateTable | None = None
        if isinstance(rates_doc, dict):
            try:
                rates = PassRateTable(float(rates_doc.get("default", 0.5)),
                                      {k: float(v) for k, v in
                                       rates_doc.get("overrides", {}).items()})
            except (TypeError, ValueError) as e:
                errors.append(f"pass_rates: {e}")
        else:
            errors.append("pass_rates must be an object")
        policy = EnrollmentPolicy()
        policy_doc = body.get("policy")
        if policy_doc is not None:
            if not isinstance(policy_doc, dict):
                errors.append("policy must be an object")
            else:
                try:
                    policy = EnrollmentPolicy(
                        extra_new_courses_per_term=int(policy_doc.get(
                            "extra_new_courses_per_term", 1)),
                        retakes_capped=bool(policy_doc.get("retakes_capped", False)))
                except (TypeError, ValueError) as e:
                    errors.append(f"policy: {e}")
        if errors:
            return _report_response(ValidationReport(errors=errors), 400)
        cfg = SimulationConfig(horizon_terms=horizon, mode=mode, plan=plan_name,
                               rates=rates, policy=policy,
                               students=int(body.get("students", 10_000)),
                               seed=int(body.get("seed", 0)))
        estimate = _estimate_seconds(cfg, len(item.curriculum))
        if estimate > simulation_budget_seconds:
            return JSONResponse(
                {"error": f"simulation estimated at {estimate:.1f}s exceeds the "
                          f"{simulation_budget_seconds:g}s budget; lower the student "
                          f"count or horizon"},
                status_code=413)
        try:
            result = simulate(item.curriculum, cfg)
        except KeyError as e:
            return JSONResponse({"error": str(e.args[0])}, status_code=404)
        except ValueError as e:
            return _report_response(ValidationReport(errors=[str(e)]), 400)
        payload = result.to_dict()
        payload["revision"] = item.revision
        return payload

    @app.get("/api/curricula/{cid}/plans/{plan_name}/profile")
    def get_profile(cid: str, plan_name: str):
        item = store.get(cid)
        if item is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        try:
            plan = item.curriculum.plan(plan_name)
        except KeyError as e:
            return JSONResponse({"error": e.args[0]}, status_code=404)
        payload = io_formats.profile_to_dict(plan_profile(item.curriculum, plan))
        payload["plan"] = plan_name
        payload["terms"] = [list(t) for t in plan.terms]
        payload["revision"] = item.revision
        return payload

    @app.get("/api/curricula/{cid}/dot")
    def get_dot(cid: str, cluster_by_plan: str | None = None,
                highlight_longest_paths: bool = False,
                shade_blocked_by: str | None = None):
        item = store.get(cid)
        if item is None:
            return JSONResponse({"error": f"no curriculum {cid!r}"}, status_code=404)
        try:
            dot = io_formats.export_dot(item.curriculum, cluster_by_plan=cluster_by_plan,
                                        highlight_longest_paths=highlight_longest_paths,
                                        shade_blocked_by=shade_blocked_by)
        except KeyError as e:
            return JSONResponse({"error": e.args[0]}, status_code=404)
        return PlainTextResponse(dot, media_type="text/vnd.graphviz")

    ui_root = ui_dir or os.environ.get("CURRIKIT_UI_DIR")
    if ui_root is None:
        bundled = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(
            os.path.abspath(__file__)))), "frontend", "dist")
        ui_root = bundled if os.path.isdir(bundled) else None
    if ui_root and os.path.isdir(ui_root):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_root, html=True), name="ui")

    return app
