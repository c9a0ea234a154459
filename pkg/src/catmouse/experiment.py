"""Experiment harness: configs, bound resolution, reports, artifacts.

A config names a graph, a cat, a mouse, a horizon, seeds, and a bound to
check.  Bounds may be explicit integers or formula tags that resolve to
integers (all square roots rounded up) before any game runs; the resolved
values are echoed into every report row.  Identical configs produce
byte-identical CSV output.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

from .cats import parse_cat_spec
from .engine import GameError, localization_report, run_game
from .graphs import DistanceOracle, Graph, GraphError, ceil_sqrt, parse_graph_spec
from .mice import parse_mouse_spec

CSV_COLUMNS = (
    "config_hash",
    "seed",
    "first_success_step",
    "min_radius",
    "argmin_step",
    "bound_d",
    "bound_t",
    "pass",
)

LOWER_BOUND_NOTE = (
    "lower-bound rows certify evasion against the strategies actually run, "
    "not against every possible cat; the exhaustive solver covers the full "
    "quantifier on tiny instances only"
)

FORMULA_TAGS = ("sqrt32n", "sqrt2n", "fourLplusK", "threeHalvesK", "tOver12")


def derive_seed(*parts) -> int:
    """Deterministic split of a seed stream by labels."""
    payload = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(payload.encode()).digest()[:8], "big")


@dataclass(frozen=True)
class ExperimentConfig:
    graph: str
    cat: str
    mouse: str
    horizon: int
    seeds: tuple[int, ...]
    repetitions: int = 1
    bound_d: int | str = "sqrt32n"
    bound_t: int | str | None = "sqrt2n"
    bound_kind: str = "upper"  # "upper" | "lower"
    save_transcripts: bool = False

    def canonical_text(self) -> str:
        lines = [
            f"graph: {self.graph}",
            f"cat: {self.cat}",
            f"mouse: {self.mouse}",
            f"horizon: {self.horizon}",
            f"seeds: {','.join(str(s) for s in self.seeds)}",
            f"repetitions: {self.repetitions}",
            f"bound_d: {self.bound_d}",
            f"bound_t: {self.bound_t}",
            f"bound_kind: {self.bound_kind}",
        ]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:12]


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse the key: value config format; collects every offending field."""
    fields: dict[str, str] = {}
    problems: list[str] = []
    known = {
        "graph",
        "cat",
        "mouse",
        "horizon",
        "seeds",
        "repetitions",
        "bound_d",
        "bound_t",
        "bound_kind",
        "save_transcripts",
    }
    for idx, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition(":")
        key = key.strip()
        if not sep:
            problems.append(f"line {idx}: expected 'key: value', got {raw!r}")
            continue
        if key not in known:
            problems.append(f"line {idx}: unknown field {key!r}")
            continue
        fields[key] = val.strip()

    def intval(key: str, default: int | None = None) -> int | None:
        if key not in fields:
            if default is None:
                problems.append(f"missing required field {key!r}")
            return default
        try:
            return int(fields[key])
        except ValueError:
            problems.append(f"field {key!r}: not an integer: {fields[key]!r}")
            return default

    for key in ("graph", "cat", "mouse"):
        if key not in fields:
            problems.append(f"missing required field {key!r}")
    horizon = intval("horizon")
    seeds: tuple[int, ...] = ()
    if "seeds" not in fields:
        problems.append("missing required field 'seeds'")
    else:
        try:
            seeds = tuple(int(s) for s in fields["seeds"].split(",") if s.strip())
        except ValueError:
            problems.append(f"field 'seeds': not a comma-separated integer list")
        if not seeds:
            problems.append("field 'seeds': must list at least one seed")
    repetitions = intval("repetitions", 1)
    bound_kind = fields.get("bound_kind", "upper")
    if bound_kind not in ("upper", "lower"):
        problems.append(f"field 'bound_kind': must be upper or lower, got {bound_kind!r}")

    def bound(key: str, default):
        raw = fields.get(key)
        if raw is None:
            return default
        if raw in FORMULA_TAGS:
            return raw
        try:
            return int(raw)
        except ValueError:
            problems.append(
                f"field {key!r}: expected an integer or one of {FORMULA_TAGS}, "
                f"got {raw!r}"
            )
            return default

    bound_d = bound("bound_d", "sqrt32n")
    bound_t = bound("bound_t", "sqrt2n")
    save = fields.get("save_transcripts", "false").lower() in ("1", "true", "yes")

    if problems:
        raise GraphError("config errors: " + "; ".join(problems))
    return ExperimentConfig(
        graph=fields["graph"],
        cat=fields["cat"],
        mouse=fields["mouse"],
        horizon=horizon,
        seeds=seeds,
        repetitions=repetitions,
        bound_d=bound_d,
        bound_t=bound_t,
        bound_kind=bound_kind,
        save_transcripts=save,
    )


def _spider_t(graph_spec: str) -> int:
    kind, _, rest = graph_spec.partition(":")
    if kind.strip() != "spider":
        raise GraphError("tOver12 bound needs a spider graph spec")
    for part in rest.split(","):
        key, _, val = part.partition("=")
        if key.strip() == "t":
            return int(val)
    raise GraphError(f"cannot read t from graph spec {graph_spec!r}")


def resolve_bound(tag: int | str | None, g: Graph, cat, cfg: ExperimentConfig) -> int | None:
    """Resolve a bound tag to an integer, rounding square roots up."""
    if tag is None or isinstance(tag, int):
        return tag
    n = g.n
    if tag == "sqrt32n":
        return ceil_sqrt(32 * n)
    if tag == "sqrt2n":
        return ceil_sqrt(2 * n)
    if tag == "fourLplusK":
        cover = getattr(cat, "cover", None)
        if cover is None:
            raise GraphError("fourLplusK bound needs a ball-cover cat")
        return 4 * cover.count + cover.radius_k
    if tag == "threeHalvesK":
        K = getattr(cat, "K", None)
        if K is None:
            raise GraphError("threeHalvesK bound needs a sphere-walk cat")
        return (3 * K + 1) // 2
    if tag == "tOver12":
        return _spider_t(cfg.graph) // 12
    raise GraphError(f"unknown bound tag {tag!r}")


@dataclass
class RunRow:
    seed: int
    repetition: int
    first_success_step: int | None
    min_radius: int | None
    argmin_step: int | None
    bound_d: int
    bound_t: int | None
    passed: bool
    note: str = ""


@dataclass
class Report:
    config: ExperimentConfig
    config_hash: str
    bound_d: int
    bound_t: int | None
    rows: list[RunRow] = field(default_factory=list)
    note: str = ""

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def pass_rate(self) -> float:
        return sum(r.passed for r in self.rows) / len(self.rows) if self.rows else 0.0

    @property
    def worst_min_radius(self) -> int | None:
        radii = [r.min_radius for r in self.rows if r.min_radius is not None]
        return max(radii) if radii else None

    def to_csv_text(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for r in sorted(self.rows, key=lambda r: (r.seed, r.repetition)):
            lines.append(
                ",".join(
                    [
                        self.config_hash,
                        str(r.seed),
                        "" if r.first_success_step is None else str(r.first_success_step),
                        "" if r.min_radius is None else str(r.min_radius),
                        "" if r.argmin_step is None else str(r.argmin_step),
                        str(r.bound_d),
                        "" if r.bound_t is None else str(r.bound_t),
                        "1" if r.passed else "0",
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "config": {
                "graph": self.config.graph,
                "cat": self.config.cat,
                "mouse": self.config.mouse,
                "horizon": self.config.horizon,
                "seeds": list(self.config.seeds),
                "repetitions": self.config.repetitions,
                "bound_kind": self.config.bound_kind,
            },
            "config_hash": self.config_hash,
            "resolved_bounds": {"d": self.bound_d, "t": self.bound_t},
            "note": self.note,
            "rows": [
                {
                    "seed": r.seed,
                    "repetition": r.repetition,
                    "first_success_step": r.first_success_step,
                    "min_radius": r.min_radius,
                    "argmin_step": r.argmin_step,
                    "pass": r.passed,
                    "note": r.note,
                }
                for r in sorted(self.rows, key=lambda r: (r.seed, r.repetition))
            ],
            "aggregate": {
                "all_pass": self.all_pass,
                "pass_rate": self.pass_rate,
                "worst_min_radius": self.worst_min_radius,
            },
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def run_experiment(cfg: ExperimentConfig, out_dir: str | None = None) -> Report:
    """Run repetitions x seeds games and aggregate pass/fail rows.

    Upper bounds pass when localization to the resolved distance happens by
    the resolved time; lower bounds pass when NO step within the horizon
    localizes to the resolved distance.  Rule violations at runtime fail the
    row instead of aborting the experiment.
    """
    if not cfg.seeds:
        raise GraphError("experiment needs a non-empty seeds list")
    if cfg.horizon < 1:
        raise GraphError(f"experiment horizon must be >= 1, got {cfg.horizon}")
    g, graph_spec = parse_graph_spec(cfg.graph)
    oracle = DistanceOracle(g)
    probe_cat = parse_cat_spec(cfg.cat, g, oracle, default_seed=0)
    bound_d = resolve_bound(cfg.bound_d, g, probe_cat, cfg)
    bound_t = resolve_bound(cfg.bound_t, g, probe_cat, cfg)
    report = Report(
        config=cfg,
        config_hash=cfg.config_hash(),
        bound_d=bound_d,
        bound_t=bound_t,
        note=LOWER_BOUND_NOTE if cfg.bound_kind == "lower" else "",
    )
    transcripts = []
    for seed in cfg.seeds:
        for rep in range(cfg.repetitions):
            row_seed = derive_seed(seed, "rep", rep) if cfg.repetitions > 1 else seed
            cat = parse_cat_spec(cfg.cat, g, oracle, default_seed=derive_seed(row_seed, "cat"))
            mouse = parse_mouse_spec(cfg.mouse, default_seed=derive_seed(row_seed, "mouse"))
            try:
                tr = run_game(
                    g,
                    cat,
                    mouse,
                    cfg.horizon,
                    track_belief=True,
                    oracle=oracle,
                    graph_spec=graph_spec,
                    meta={"cat": cat.spec, "mouse": mouse.spec, "seed": row_seed},
                )
            except (GameError, GraphError) as exc:
                report.rows.append(
                    RunRow(seed, rep, None, None, None, bound_d, bound_t, False, str(exc))
                )
                continue
            loc = localization_report(tr, bound_d)
            if cfg.bound_kind == "upper":
                passed = loc.first_success_step is not None and (
                    bound_t is None or loc.first_success_step <= bound_t
                )
            else:
                passed = loc.first_success_step is None
            report.rows.append(
                RunRow(
                    seed,
                    rep,
                    loc.first_success_step,
                    loc.min_radius,
                    loc.argmin_step,
                    bound_d,
                    bound_t,
                    passed,
                )
            )
            if cfg.save_transcripts:
                transcripts.append((seed, rep, tr))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.csv"), "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv_text())
        with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(report.to_json_text())
        if transcripts:
            tdir = os.path.join(out_dir, "transcripts")
            os.makedirs(tdir, exist_ok=True)
            for seed, rep, tr in transcripts:
                path = os.path.join(tdir, f"seed{seed}_rep{rep}.json")
                with open(path, "w", encoding="utf-8") as fh:
                    fh.write(tr.to_json())
    return report
