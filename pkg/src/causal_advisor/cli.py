"""Command-line interface wiring discovery, fitting, and counterfactuals.

Exit codes: 0 success, 1 usage error, 2 data or validation failure,
3 numerical failure. Every failure prints one line on standard error of
the form ``error[ExceptionType]: message``. Every successful run records a
manifest (command, configuration hash, seed, input file hashes, output
paths, timestamp): commands that write files place ``manifest.json`` next
to their outputs; commands that print their payload to standard output emit
one ``manifest: {...}`` line on standard error instead, keeping standard
output machine-parseable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from .dataio import (
    load_csv,
    load_graph,
    load_knowledge,
    load_normalization,
    load_scm,
    save_csv,
    save_graph,
    save_normalization,
    save_scm,
    scm_to_dict,
)
from .datagen import (
    SurrogateConfig,
    SynthConfig,
    generate_chain_synthetic,
    generate_student_surrogate,
)
from .discovery import GesConfig, PcConfig, ges_discover, pc_discover
from .effects import estimate_ate
from .errors import (
    CausalAdvisorError,
    DataValidationError,
    InvalidQueryError,
    NumericalError,
    UnknownColumnError,
)
from .graphs import MixedGraph, PdagWorkspace
from .scm import Intervention, Observation, counterfactual, fit_linear_scm, recommend_min_change
from .stats import Dataset, NormalizationRecord

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

# invented display units for the surrogate demo: the pass threshold in
# z-units (-0.901) maps to a raw grade of 50 with std 10
DEMO_OUTCOME_MEAN = 59.01
DEMO_OUTCOME_STD = 10.0
DEMO_FEATURE_MEAN = 60.0
DEMO_FEATURE_STD = 12.0

# the worked single-student example used throughout the docs
DEMO_ROW = {"node13": 0.06, "node16": -2.57, "node34": -0.365, "node39": -1.29}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems with exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error[UsageError]: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest_dict(
    command: str,
    config: dict,
    seed: int | None,
    inputs: list[Path],
    outputs: list[Path],
) -> dict:
    return {
        "command": command,
        "config_hash": hashlib.sha256(
            json.dumps(config, sort_keys=True).encode()
        ).hexdigest(),
        "config": config,
        "seed": seed,
        "input_hashes": {str(p): _sha256(p) for p in inputs},
        "output_paths": [str(p) for p in outputs],
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }


def _write_manifest(
    out_dir: Path,
    command: str,
    config: dict,
    seed: int | None,
    inputs: list[Path],
    outputs: list[Path],
) -> None:
    manifest = _manifest_dict(command, config, seed, inputs, outputs)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _stderr_manifest(command: str, config: dict, inputs: list[Path]) -> None:
    # stdout stays machine-parseable; the manifest goes to stderr instead.
    manifest = _manifest_dict(command, config, None, inputs, [])
    print(f"manifest: {json.dumps(manifest, sort_keys=True)}", file=sys.stderr)


def _thread_cap() -> int | None:
    """Parse CAUSAL_ADVISOR_THREADS; currently informational only."""
    raw = os.environ.get("CAUSAL_ADVISOR_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise DataValidationError(
            f"CAUSAL_ADVISOR_THREADS must be an integer, got {raw!r}"
        ) from None
    if cap < 1:
        raise DataValidationError("CAUSAL_ADVISOR_THREADS must be at least 1")
    return cap


def _resolve_column(d: Dataset, name: str) -> int:
    try:
        return d.index_of(name)
    except UnknownColumnError:
        raise
    except Exception:
        raise UnknownColumnError(f"unknown column {name!r}") from None


def _parse_observation(raw: str, scm_labels: tuple[str, ...], data: Dataset | None) -> Observation:
    """An observation is either a row index into --data or inline JSON."""
    try:
        row = int(raw)
    except ValueError:
        row = None
    if row is not None:
        if data is None:
            raise InvalidQueryError("--obs row index requires --data")
        if not 0 <= row < data.n_rows:
            raise InvalidQueryError(
                f"row {row} outside 0..{data.n_rows - 1} of the dataset"
            )
        if tuple(data.column_names) != tuple(scm_labels):
            raise DataValidationError("dataset columns do not match the SCM nodes")
        return Observation({v: float(data.values[row, v]) for v in range(data.n_cols)})
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError:
        raise InvalidQueryError(
            "--obs must be a row index or a JSON object of name: value pairs"
        ) from None
    if not isinstance(obj, dict):
        raise InvalidQueryError("--obs JSON must be an object of name: value pairs")
    values = {}
    for name, value in obj.items():
        if name not in scm_labels:
            raise UnknownColumnError(f"observation names unknown node {name!r}")
        values[scm_labels.index(name)] = float(value)
    return Observation(values)


def _parse_assignment(raw: str, labels: tuple[str, ...]) -> tuple[int, float]:
    name, sep, value = raw.partition("=")
    if not sep:
        raise InvalidQueryError(f"--set expects NAME=VALUE, got {raw!r}")
    if name not in labels:
        raise UnknownColumnError(f"--set names unknown node {name!r}")
    try:
        return labels.index(name), float(value)
    except ValueError:
        raise InvalidQueryError(f"--set value {value!r} is not a number") from None


def _cmd_synth(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.generator == "chain":
        cfg = SynthConfig(n=args.n, seed=args.seed)
        bundle = generate_chain_synthetic(cfg)
        config = {"generator": "chain", "n": args.n, "seed": args.seed}
    else:
        cfg = SurrogateConfig(n=args.n, seed=args.seed)
        bundle = generate_student_surrogate(cfg)
        config = {"generator": "student", "n": args.n, "seed": args.seed}
    data_path = out_dir / "data.csv"
    graph_path = out_dir / "truth_graph.json"
    scm_path = out_dir / "truth_scm.json"
    save_csv(bundle.dataset, data_path)
    save_graph(bundle.truth_dag, "json", graph_path)
    save_scm(bundle.truth_scm, scm_path)
    outputs = [data_path, graph_path, scm_path]
    if args.generator == "student":
        labels = bundle.dataset.column_names
        rec = NormalizationRecord(
            column_names=labels,
            means=tuple(
                DEMO_OUTCOME_MEAN if n == "node39" else DEMO_FEATURE_MEAN for n in labels
            ),
            stds=tuple(
                DEMO_OUTCOME_STD if n == "node39" else DEMO_FEATURE_STD for n in labels
            ),
        )
        norm_path = out_dir / "normalization.json"
        save_normalization(rec, norm_path)
        outputs.append(norm_path)
    _write_manifest(out_dir, "synth", config, args.seed, [], outputs)
    print(f"wrote {', '.join(str(p) for p in outputs)}")
    return EXIT_OK


def _cmd_discover(args) -> int:
    d = load_csv(args.data)
    knowledge = None
    inputs = [Path(args.data)]
    if args.knowledge:
        knowledge = load_knowledge(args.knowledge, d.column_names)
        inputs.append(Path(args.knowledge))
    if args.algo == "pc":
        g = pc_discover(d, knowledge, PcConfig(alpha=args.alpha))
    else:
        g = ges_discover(d, knowledge, GesConfig())
    out_path = Path(args.out)
    save_graph(g, "json", out_path)
    outputs = [out_path]
    if args.dot:
        save_graph(g, "dot", Path(args.dot))
        outputs.append(Path(args.dot))
    if out_path.parent.is_dir():
        config = {"algo": args.algo, "alpha": args.alpha, "knowledge": bool(args.knowledge)}
        _write_manifest(out_path.parent, "discover", config, None, inputs, outputs)
    directed, undirected = len(g.directed), len(g.undirected)
    print(f"discovered {directed} directed and {undirected} undirected edges")
    return EXIT_OK


def _orient_pairs(g: MixedGraph, orient: list[str]) -> MixedGraph:
    ws = PdagWorkspace.from_skeleton(g.node_count, [])
    for a, b in g.directed:
        ws.add_directed(a, b)
    for a, b in g.undirected:
        ws.add_undirected(a, b)
    for spec in orient:
        parts = spec.split(",")
        if len(parts) != 2:
            raise InvalidQueryError(f"--orient expects FROM,TO, got {spec!r}")
        try:
            a = g.node_labels.index(parts[0])
            b = g.node_labels.index(parts[1])
        except ValueError:
            raise UnknownColumnError(f"--orient names unknown node in {spec!r}") from None
        if not ws.is_undirected(a, b):
            raise InvalidQueryError(
                f"--orient {spec!r} does not match an undirected edge"
            )
        ws.orient(a, b)
    return ws.to_mixed(g.node_labels)


def _cmd_fit_scm(args) -> int:
    d = load_csv(args.data)
    g = load_graph(args.graph)
    if args.orient:
        g = _orient_pairs(g, args.orient)
    if g.undirected:
        pairs = ", ".join(
            f"{g.node_labels[a]},{g.node_labels[b]}" for a, b in sorted(g.undirected)
        )
        raise DataValidationError(
            f"graph has undirected edges ({pairs}); rerun discovery with "
            "background knowledge or pass --orient FROM,TO to resolve them"
        )
    scm = fit_linear_scm(d, g)
    out_path = Path(args.out)
    save_scm(scm, out_path)
    if out_path.parent.is_dir():
        _write_manifest(
            out_path.parent,
            "fit-scm",
            {"orient": args.orient or []},
            None,
            [Path(args.data), Path(args.graph)],
            [out_path],
        )
    print(f"fitted linear SCM over {scm.node_count} nodes -> {out_path}")
    return EXIT_OK


def _cmd_ate(args) -> int:
    d = load_csv(args.data)
    g = load_graph(args.graph)
    t = _resolve_column(d, args.treatment)
    o = _resolve_column(d, args.outcome)
    res = estimate_ate(d, g, t, o)
    adj = ", ".join(sorted(g.node_labels[v] for v in res.adjustment_set)) or "(none)"
    print(f"{'treatment':<12} {args.treatment}")
    print(f"{'outcome':<12} {args.outcome}")
    print(f"{'adjusted_on':<12} {adj}")
    print(f"{'effect':<12} {res.effect:.6f}")
    print(f"{'std_error':<12} {res.std_error:.6f}")
    print(f"{'p_value':<12} {res.p_value:.3g}")
    print(f"{'naive_effect':<12} {res.naive_effect:.6f}")
    _stderr_manifest(
        "ate",
        {"treatment": args.treatment, "outcome": args.outcome},
        [Path(args.data), Path(args.graph)],
    )
    return EXIT_OK


def _cmd_cf(args) -> int:
    scm = load_scm(args.scm)
    data = load_csv(args.data) if args.data else None
    obs = _parse_observation(args.obs, scm.node_labels, data)
    assignments = dict(
        _parse_assignment(raw, scm.node_labels) for raw in (args.set or [])
    )
    res = counterfactual(scm, obs, Intervention(assignments))
    payload = {
        "counterfactual_values": {
            scm.node_labels[v]: res.counterfactual_values[v]
            for v in sorted(res.counterfactual_values)
        },
        "intervened": sorted(scm.node_labels[v] for v in res.intervened),
        "abducted_noise": {
            scm.node_labels[v]: res.abducted_noise[v]
            for v in sorted(res.abducted_noise)
        },
    }
    print(json.dumps(payload, indent=2))
    inputs = [Path(args.scm)] + ([Path(args.data)] if args.data else [])
    _stderr_manifest("cf", {"obs": args.obs, "set": args.set or []}, inputs)
    return EXIT_OK


def _cmd_recommend(args) -> int:
    scm = load_scm(args.scm)
    data = load_csv(args.data) if args.data else None
    obs = _parse_observation(args.obs, scm.node_labels, data)
    target = scm.node_labels.index(args.target) if args.target in scm.node_labels else None
    if target is None:
        raise UnknownColumnError(f"--target names unknown node {args.target!r}")
    actionable = set()
    for name in args.actionable.split(","):
        name = name.strip()
        if name not in scm.node_labels:
            raise UnknownColumnError(f"--actionable names unknown node {name!r}")
        actionable.add(scm.node_labels.index(name))
    rec = recommend_min_change(
        scm, obs, target, args.threshold, actionable, mode=args.mode
    )
    payload = {
        "intervention": {
            scm.node_labels[v]: rec.assignments[v] for v in sorted(rec.assignments)
        },
        "empty": rec.is_empty(),
    }
    print(json.dumps(payload, indent=2))
    inputs = [Path(args.scm)] + ([Path(args.data)] if args.data else [])
    _stderr_manifest(
        "recommend",
        {
            "obs": args.obs,
            "target": args.target,
            "threshold": args.threshold,
            "actionable": args.actionable,
            "mode": args.mode,
        },
        inputs,
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionState, create_app

    scm = load_scm(args.scm)
    d = load_csv(args.data)
    record = load_normalization(args.normalization) if args.normalization else None
    if args.demo_row:
        if tuple(d.column_names) != tuple(sorted(DEMO_ROW)):
            raise DataValidationError(
                "--demo-row expects the student surrogate columns "
                "node13, node16, node34, node39"
            )
        import numpy as np

        row = np.array([[DEMO_ROW[name] for name in d.column_names]])
        d = Dataset(d.column_names, np.vstack([d.values, row]))
    outcome = (
        _resolve_column(d, args.outcome) if args.outcome else d.n_cols - 1
    )
    if args.actionable:
        actionable = []
        for name in args.actionable.split(","):
            actionable.append(_resolve_column(d, name.strip()))
    else:
        actionable = [v for v in range(d.n_cols) if v != outcome]
    state = SessionState(
        scm=scm,
        dataset=d,
        normalization=record,
        outcome=outcome,
        actionable=tuple(actionable),
        threshold_z=args.threshold,
    )
    app = create_app(state)
    _stderr_manifest(
        "serve",
        {
            "outcome": d.column_names[outcome],
            "threshold": args.threshold,
            "port": args.port,
        },
        [Path(args.scm), Path(args.data)],
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causal-advisor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic benchmark dataset")
    p.add_argument("--generator", choices=["chain", "student"], required=True)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("discover", help="estimate a CPDAG from data")
    p.add_argument("--data", required=True)
    p.add_argument("--algo", choices=["pc", "ges"], default="pc")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--knowledge", help="background knowledge JSON")
    p.add_argument("--out", required=True, help="graph JSON path")
    p.add_argument("--dot", help="also write DOT here")
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("fit-scm", help="fit a linear SCM on a directed graph")
    p.add_argument("--data", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--out", required=True)
    p.add_argument(
        "--orient",
        action="append",
        metavar="FROM,TO",
        help="orient an undirected edge; repeatable",
    )
    p.set_defaults(func=_cmd_fit_scm)

    p = sub.add_parser("ate", help="backdoor-adjusted treatment effect")
    p.add_argument("--data", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--treatment", required=True)
    p.add_argument("--outcome", required=True)
    p.set_defaults(func=_cmd_ate)

    p = sub.add_parser("cf", help="counterfactual prediction for one observation")
    p.add_argument("--scm", required=True)
    p.add_argument("--obs", required=True, help="row index (with --data) or JSON object")
    p.add_argument("--data", help="CSV whose rows --obs may index")
    p.add_argument("--set", action="append", metavar="NAME=VALUE")
    p.set_defaults(func=_cmd_cf)

    p = sub.add_parser("recommend", help="minimal intervention reaching a threshold")
    p.add_argument("--scm", required=True)
    p.add_argument("--obs", required=True)
    p.add_argument("--data")
    p.add_argument("--target", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--actionable", required=True, help="comma-separated node names")
    p.add_argument("--mode", choices=["all", "single"], default="all")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--scm", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--normalization", help="normalization record JSON")
    p.add_argument("--threshold", type=float, default=-0.901)
    p.add_argument("--outcome", help="outcome column (default: last)")
    p.add_argument("--actionable", help="comma-separated (default: all but outcome)")
    p.add_argument("--demo-row", action="store_true", help="append the worked example row")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_cap()
        return args.func(args)
    except NumericalError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CausalAdvisorError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
