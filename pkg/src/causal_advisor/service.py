"""HTTP/JSON facade over a fitted SCM and a dataset of observations.

All model arithmetic happens in z-score units; when a normalization record
is present, responses also carry raw-unit values for display. State is
immutable after startup, so request handling is pure and safe to run
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .dataio import graph_to_dict, scm_to_dict
from .errors import (
    InvalidQueryError,
    MissingValueError,
    NumericalError,
    UnknownNodeError,
    ZeroEffectError,
)
from .scm import (
    Intervention,
    LinearScm,
    Observation,
    counterfactual,
    recommend_min_change,
)
from .stats import Dataset, NormalizationRecord

__all__ = ["SessionState", "create_app"]


@dataclass(frozen=True)
class SessionState:
    """Everything the service needs, frozen at startup."""

    scm: LinearScm
    dataset: Dataset | None
    normalization: NormalizationRecord | None
    outcome: int
    actionable: tuple[int, ...]
    threshold_z: float = -0.901

    def __post_init__(self):
        labels = self.scm.node_labels
        if not 0 <= self.outcome < len(labels):
            raise UnknownNodeError(f"outcome index {self.outcome} out of range")
        for v in self.actionable:
            if not 0 <= v < len(labels):
                raise UnknownNodeError(f"actionable index {v} out of range")
        if self.dataset is not None and tuple(self.dataset.column_names) != labels:
            raise InvalidQueryError("dataset columns must match the SCM nodes")

    def to_raw(self, node: int, z: float) -> float:
        if self.normalization is None:
            return z
        return self.normalization.z_to_raw(self.scm.node_labels[node], z)

    @property
    def threshold_raw(self) -> float:
        return self.to_raw(self.outcome, self.threshold_z)


class CounterfactualRequest(BaseModel):
    observation_id: int | None = None
    values: dict[str, float] | None = None
    interventions: dict[str, float] = {}


class RecommendRequest(BaseModel):
    observation_id: int | None = None
    values: dict[str, float] | None = None
    actionable: list[str] | None = None
    mode: str = "all"


def _named(state: SessionState, values: dict[int, float]) -> dict[str, float]:
    labels = state.scm.node_labels
    return {labels[v]: values[v] for v in sorted(values)}


def _named_raw(state: SessionState, values: dict[int, float]) -> dict[str, float]:
    labels = state.scm.node_labels
    return {labels[v]: state.to_raw(v, values[v]) for v in sorted(values)}


def _resolve_nodes(state: SessionState, names: dict[str, float], what: str) -> dict[int, float]:
    labels = state.scm.node_labels
    out = {}
    for name, value in names.items():
        if name not in labels:
            raise HTTPException(400, f"{what} names unknown node {name!r}")
        if not math.isfinite(value):
            raise HTTPException(400, f"{what} value for {name!r} is not finite")
        out[labels.index(name)] = float(value)
    return out


def _observation(state: SessionState, observation_id: int | None, values) -> Observation:
    if (observation_id is None) == (values is None):
        raise HTTPException(
            400, "provide exactly one of 'observation_id' and 'values'"
        )
    if observation_id is not None:
        d = state.dataset
        if d is None or not 0 <= observation_id < d.n_rows:
            raise HTTPException(404, f"no observation with id {observation_id}")
        return Observation(
            {v: float(d.values[observation_id, v]) for v in range(d.n_cols)}
        )
    return Observation(_resolve_nodes(state, values, "'values'"))


def create_app(state: SessionState | None = None) -> FastAPI:
    app = FastAPI(title="causal-advisor")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_state() -> SessionState:
        if state is None:
            raise HTTPException(503, "service not initialized")
        return state

    @app.get("/api/graph")
    def get_graph():
        return graph_to_dict(require_state().scm.graph)

    @app.get("/api/model")
    def get_model():
        return scm_to_dict(require_state().scm)

    @app.get("/api/config")
    def get_config():
        s = require_state()
        labels = s.scm.node_labels
        return {
            "nodes": list(labels),
            "outcome": labels[s.outcome],
            "actionable": [labels[v] for v in s.actionable],
            "threshold_z": s.threshold_z,
            "threshold_raw": s.threshold_raw,
            "has_normalization": s.normalization is not None,
            "observation_count": 0 if s.dataset is None else s.dataset.n_rows,
        }

    @app.get("/api/observations")
    def get_observations():
        s = require_state()
        if s.dataset is None:
            return []
        rows = []
        for i in range(s.dataset.n_rows):
            values = {v: float(s.dataset.values[i, v]) for v in range(s.dataset.n_cols)}
            outcome_z = values[s.outcome]
            rows.append(
                {
                    "id": i,
                    "values": _named(s, values),
                    "raw_values": _named_raw(s, values),
                    "outcome": outcome_z,
                    "outcome_raw": s.to_raw(s.outcome, outcome_z),
                    "passes": outcome_z >= s.threshold_z,
                }
            )
        return rows

    @app.post("/api/counterfactual")
    def post_counterfactual(req: CounterfactualRequest):
        s = require_state()
        obs = _observation(s, req.observation_id, req.values)
        assignments = _resolve_nodes(s, req.interventions, "'interventions'")
        try:
            res = counterfactual(s.scm, obs, Intervention(assignments))
        except (MissingValueError, UnknownNodeError, InvalidQueryError) as exc:
            raise HTTPException(400, str(exc)) from exc
        outcome_z = res.counterfactual_values[s.outcome]
        return {
            "counterfactual_values": _named(s, res.counterfactual_values),
            "raw_values": _named_raw(s, res.counterfactual_values),
            "outcome": outcome_z,
            "outcome_raw": s.to_raw(s.outcome, outcome_z),
            "passes": outcome_z >= s.threshold_z,
            "abducted_noise": _named(s, res.abducted_noise),
        }

    @app.post("/api/recommend")
    def post_recommend(req: RecommendRequest):
        s = require_state()
        obs = _observation(s, req.observation_id, req.values)
        if req.actionable is None:
            actionable = set(s.actionable)
        else:
            if not req.actionable:
                raise HTTPException(400, "'actionable' must not be empty")
            labels = s.scm.node_labels
            actionable = set()
            for name in req.actionable:
                if name not in labels:
                    raise HTTPException(400, f"'actionable' names unknown node {name!r}")
                actionable.add(labels.index(name))
        try:
            rec = recommend_min_change(
                s.scm, obs, s.outcome, s.threshold_z, actionable, mode=req.mode
            )
        except ZeroEffectError as exc:
            raise HTTPException(
                422, f"no actionable node moves the outcome: {exc}"
            ) from exc
        except (InvalidQueryError, MissingValueError, UnknownNodeError) as exc:
            raise HTTPException(400, str(exc)) from exc
        except NumericalError as exc:
            raise HTTPException(422, str(exc)) from exc
        replay = counterfactual(s.scm, obs, rec)
        predicted_z = replay.counterfactual_values[s.outcome]
        norm = math.sqrt(
            sum(
                (value - obs.values[v]) ** 2
                for v, value in rec.assignments.items()
            )
        )
        return {
            "intervention": _named(s, rec.assignments),
            "intervention_raw": _named_raw(s, rec.assignments),
            "empty": rec.is_empty(),
            "predicted_outcome": predicted_z,
            "predicted_outcome_raw": s.to_raw(s.outcome, predicted_z),
            "passes": predicted_z >= s.threshold_z,
            "norm_of_change": norm,
        }

    return app
