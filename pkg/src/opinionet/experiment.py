"""Reproducible experiment harness.

Runs a (seed x confidence mode x method x budget) grid over one graph,
recording overall opinion before/after each allocation. Every cell is
deterministic given the config, and the emitted CSV is byte-identical
across reruns; wall-clock timings go to a sidecar file so they never
perturb the report itself.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .admm import calibrate_lambda
from .allocate import baseline_allocate, greedy_allocate, rank_nodes
from .confidence import DEFAULT_DAMPING, confidence_fixed, confidence_from_spec
from .dynamics import (OpinionSystem, contribution_index, equilibrium_direct,
                       omstn_fixed_point, overall_opinion)
from .errors import ConfigError, OpinionetError
from .graph import SignedDigraph
from .ingest import EdgeListFormat, gen_synthetic, init_opinions, load_graph_file

KNOWN_METHODS = ("greedy", "admm", "rand", "trust", "io")
BENEFIT_CROSSCHECK_TOL = 1e-6

CSV_HEADER = ("fingerprint", "kind", "seed", "alpha", "method", "budget",
              "p_before", "p_after", "benefit", "unit_benefit")
TIMING_HEADER = ("fingerprint", "seed", "alpha", "method", "budget", "wall_time_s")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a generated graph, parseable from 'n=..,p=..,nu=..,seed=..'."""

    n: int
    p: float
    nu: float = 0.0
    seed: int = 0
    weight_dist: str = "uniform"

    @classmethod
    def from_string(cls, text):
        fields = {}
        for part in text.split(","):
            if not part:
                continue
            try:
                key, value = part.split("=", 1)
            except ValueError:
                raise ConfigError(f"bad synthetic spec fragment {part!r}") from None
            fields[key.strip()] = value.strip()
        try:
            return cls(
                n=int(fields["n"]),
                p=float(fields["p"]),
                nu=float(fields.get("nu", 0.0)),
                seed=int(fields.get("seed", 0)),
                weight_dist=fields.get("dist", "uniform"),
            )
        except KeyError as exc:
            raise ConfigError(f"synthetic spec needs {exc.args[0]}=...") from None

    def build(self):
        return gen_synthetic(self.n, self.p, self.nu, self.weight_dist, self.seed)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on."""

    graph_path: str | None = None
    synthetic: SyntheticSpec | None = None
    delimiter: str = ","
    columns: tuple[int, ...] = (0, 1, 2)
    header: bool = False
    comment: str = "#"
    normalize: str = "identity"
    dedupe: str = "keeplast"
    init: str = "uniform"
    seeds: tuple[int, ...] = tuple(range(10))
    alpha_modes: tuple[str, ...] = ("fixed:0.5",)
    methods: tuple[str, ...] = ("greedy",)
    budgets: tuple[float, ...] = (10.0,)
    objective: str = "max"
    damping: float = DEFAULT_DAMPING
    pr_tol: float = 1e-12

    def __post_init__(self):
        if (self.graph_path is None) == (self.synthetic is None):
            raise ConfigError("exactly one of graph_path or synthetic must be set")
        if not self.methods:
            raise ConfigError("at least one method is required")
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise ConfigError(f"unknown method {m!r}; known: {', '.join(KNOWN_METHODS)}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not self.budgets or any(b < 0 for b in self.budgets):
            raise ConfigError("budgets must be nonempty and nonnegative")
        if not self.alpha_modes:
            raise ConfigError("at least one confidence mode is required")
        if self.objective not in ("max", "min"):
            raise ConfigError("objective must be 'max' or 'min'")

    def edge_format(self):
        cols = self.columns
        ts = cols[3] if len(cols) > 3 else None
        return EdgeListFormat(delimiter=self.delimiter, src_col=cols[0], dst_col=cols[1],
                              weight_col=cols[2], timestamp_col=ts, header=self.header,
                              comment=self.comment)

    def load_graph(self):
        if self.synthetic is not None:
            return self.synthetic.build()
        return load_graph_file(self.graph_path, self.edge_format(),
                               normalize=self.normalize, dedupe=self.dedupe)

    def canonical(self):
        syn = self.synthetic
        d = {
            "graph_path": self.graph_path,
            "synthetic": None if syn is None else {
                "n": syn.n, "p": syn.p, "nu": syn.nu,
                "seed": syn.seed, "weight_dist": syn.weight_dist,
            },
            "delimiter": self.delimiter,
            "columns": list(self.columns),
            "header": self.header,
            "comment": self.comment,
            "normalize": self.normalize,
            "dedupe": self.dedupe,
            "init": self.init,
            "seeds": list(self.seeds),
            "alpha_modes": list(self.alpha_modes),
            "methods": list(self.methods),
            "budgets": [float(b) for b in self.budgets],
            "objective": self.objective,
            "damping": self.damping,
            "pr_tol": self.pr_tol,
        }
        return d


def config_fingerprint(cfg: ExperimentConfig):
    """Short stable hash of the canonicalized config."""
    blob = json.dumps(cfg.canonical(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class ExperimentRow:
    seed: int
    alpha: str
    method: str
    budget: float
    p_before: float
    p_after: float
    benefit: float
    unit_benefit: float
    wall_time_s: float


@dataclass
class ExperimentReport:
    fingerprint: str
    rows: list[ExperimentRow] = field(default_factory=list)

    def aggregates(self):
        """(alpha, method, budget) -> (mean benefit, std benefit, mean rows...)
        over seeds, in first-appearance order. Population std (ddof=0)."""
        order = []
        groups = {}
        for row in self.rows:
            key = (row.alpha, row.method, row.budget)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(row)
        out = []
        for key in order:
            rows = groups[key]
            cols = {
                name: np.array([getattr(r, name) for r in rows])
                for name in ("p_before", "p_after", "benefit", "unit_benefit")
            }
            mean = {name: float(v.mean()) for name, v in cols.items()}
            std = {name: float(v.std()) for name, v in cols.items()}
            out.append((key, mean, std))
        return out

    def mean_benefit(self, alpha=None, method=None):
        vals = [r.benefit for r in self.rows
                if (alpha is None or r.alpha == alpha)
                and (method is None or r.method == method)]
        return float(np.mean(vals)) if vals else 0.0

    def write_csv(self, path, timing_path=None):
        """Write the deterministic report; timings go to the sidecar file."""
        lines = [",".join(CSV_HEADER)]
        for r in self.rows:
            lines.append(",".join([
                self.fingerprint, "row", str(r.seed), r.alpha, r.method,
                _fmt(r.budget), _fmt(r.p_before), _fmt(r.p_after),
                _fmt(r.benefit), _fmt(r.unit_benefit),
            ]))
        for (alpha, method, budget), mean, std in self.aggregates():
            for kind, stats in (("mean", mean), ("std", std)):
                lines.append(",".join([
                    self.fingerprint, kind, "", alpha, method, _fmt(budget),
                    _fmt(stats["p_before"]), _fmt(stats["p_after"]),
                    _fmt(stats["benefit"]), _fmt(stats["unit_benefit"]),
                ]))
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

        if timing_path is None:
            timing_path = str(path) + ".timing.csv"
        with open(timing_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(TIMING_HEADER) + "\n")
            for r in self.rows:
                fh.write(",".join([self.fingerprint, str(r.seed), r.alpha, r.method,
                                   _fmt(r.budget), _fmt(r.wall_time_s)]) + "\n")


def _fmt(x):
    return repr(float(x))


def _allocate(method, gvec, graph, s, budget, objective, seed):
    if method == "greedy":
        return greedy_allocate(gvec, s, budget, objective=objective)
    if method == "admm":
        coef = gvec if objective == "max" else -gvec
        _, plan = calibrate_lambda(coef, s, budget)
        return plan
    direction = 1.0 if objective == "max" else -1.0
    ordering = rank_nodes(graph, s, method, seed=seed)
    return baseline_allocate(ordering, s, budget, method=method, direction=direction)


def run_experiment(cfg: ExperimentConfig, graph: SignedDigraph | None = None):
    """Execute the full grid; returns an ExperimentReport.

    The contribution index is computed once per (graph, confidence mode)
    and reused across seeds, methods, and budgets. Every row's benefit is
    the re-solved equilibrium difference, cross-checked against g . delta_s.
    """
    if graph is None:
        graph = cfg.load_graph()
    fingerprint = config_fingerprint(cfg)
    report = ExperimentReport(fingerprint=fingerprint)

    for alpha_mode in cfg.alpha_modes:
        conf = confidence_from_spec(graph, alpha_mode, damping=cfg.damping,
                                    pr_tol=cfg.pr_tol)
        system = OpinionSystem(graph, conf)
        gvec = contribution_index(system)
        for seed in cfg.seeds:
            s = init_opinions(graph, cfg.init, seed)
            p_before = overall_opinion(equilibrium_direct(system, s).z_star)
            for method in cfg.methods:
                for budget in cfg.budgets:
                    t0 = time.perf_counter()
                    plan = _allocate(method, gvec, graph, s, budget, cfg.objective, seed)
                    plan.validate(s, budget)
                    p_after = overall_opinion(
                        equilibrium_direct(system, s + plan.delta_s).z_star
                    )
                    wall = time.perf_counter() - t0
                    gain = p_after - p_before
                    linear_gain = float(np.dot(gvec, plan.delta_s))
                    if abs(gain - linear_gain) > BENEFIT_CROSSCHECK_TOL:
                        raise OpinionetError(
                            f"benefit cross-check failed: equilibrium delta {gain} "
                            f"vs linear prediction {linear_gain}"
                        )
                    report.rows.append(ExperimentRow(
                        seed=seed, alpha=alpha_mode, method=method, budget=float(budget),
                        p_before=p_before, p_after=p_after, benefit=gain,
                        unit_benefit=gain / budget if budget > 0 else 0.0,
                        wall_time_s=wall,
                    ))
    return report


def sweep_budget(cfg: ExperimentConfig, graph: SignedDigraph | None = None):
    """run_experiment over an increasing budget grid."""
    budgets = list(cfg.budgets)
    if budgets != sorted(budgets):
        raise ConfigError("budget sweep grid must be increasing")
    return run_experiment(cfg, graph=graph)


def compare_models(graph: SignedDigraph, s, alpha0=0.5, tol=1e-12):
    """Max-norm gap between this model's equilibrium at fixed alpha0 and
    the predecessor model's fixed point. Expected ~0 at alpha0 = 1/2."""
    conf = confidence_fixed(graph.n, alpha0)
    system = OpinionSystem(graph, conf)
    z_model = equilibrium_direct(system, s).z_star
    z_omstn = omstn_fixed_point(graph, s, tol=tol)
    if z_model.size == 0:
        return 0.0
    return float(np.abs(z_model - z_omstn).max())


def load_config(path, overrides=None):
    """Read an INI experiment config; overrides is a flat dict of
    section-less keys applied on top (CLI flags)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")

    def get(section, key, default=None):
        return parser.get(section, key, fallback=default)

    source = get("graph", "source")
    if source is None:
        raise ConfigError("config needs [graph] source = <path or synthetic:...>")
    graph_path, synthetic = _parse_source(source)

    cols_text = get("graph", "columns", "0,1,2")
    columns = tuple(int(c) for c in cols_text.split(","))

    cfg = ExperimentConfig(
        graph_path=graph_path,
        synthetic=synthetic,
        delimiter=get("graph", "delimiter", ","),
        columns=columns,
        header=parser.getboolean("graph", "header", fallback=False),
        comment=get("graph", "comment", "#"),
        normalize=get("graph", "normalize", "identity"),
        dedupe=get("graph", "dedupe", "keeplast"),
        init=get("init", "scheme", "uniform"),
        seeds=_parse_int_list(get("init", "seeds", "0,1,2,3,4,5,6,7,8,9")),
        alpha_modes=_parse_str_list(get("alpha", "modes", "fixed:0.5")),
        methods=_parse_str_list(get("run", "methods", "greedy")),
        budgets=parse_budgets(get("run", "budgets", "10")),
        objective=get("run", "objective", "max"),
        damping=float(get("alpha", "damping", str(DEFAULT_DAMPING))),
        pr_tol=float(get("alpha", "pr_tol", "1e-12")),
    )
    if overrides:
        known = {f.name for f in cfg.__dataclass_fields__.values()}
        bad = set(overrides) - known
        if bad:
            raise ConfigError(f"unknown config overrides: {sorted(bad)}")
        cfg = replace(cfg, **overrides)
    return cfg


def _parse_source(source):
    if source.startswith("synthetic:"):
        return None, SyntheticSpec.from_string(source.split(":", 1)[1])
    return source, None


def _parse_int_list(text):
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def _parse_str_list(text):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def parse_budgets(text):
    """Parse '1,2,4' or 'range:start:stop:step' (stop inclusive)."""
    text = text.strip()
    if text.startswith("range:"):
        try:
            start, stop, step = (float(v) for v in text.split(":")[1:4])
        except (ValueError, IndexError):
            raise ConfigError(f"bad budget range {text!r}") from None
        if step <= 0:
            raise ConfigError("budget range step must be positive")
        out = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 1e-9:
                break
            out.append(v)
            k += 1
        return tuple(out)
    return tuple(float(v) for v in text.replace(" ", "").split(",") if v)
