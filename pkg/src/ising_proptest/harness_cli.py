"""Monte Carlo experiments: build null/alternative models from named graph
constructions, run a test over a parameter sweep and tabulate error rates.

Trial t on side s of grid point g draws its data from the RNG stream
(master_seed, g, s, t), so results do not depend on execution order.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from . import graph_core as gr
from .bounds import example_bounds
from .general_tests import (GeneralTestConfig, fast_cycle_conditions, fast_cycle_test,
                      generic_conditions, generic_test)
from .graph_core import Graph, WeightedGraph
from .ising_core import (SAMPLE_GUARD, IsingModel, StateCounts, gibbs_sample, make_rng,
                    state_probabilities)
from .screening import (clique_condition, clique_size_test, connectivity_condition,
                        connectivity_test, cycle_condition, cycle_test, tau)

TESTS = ("connectivity", "cycle", "clique", "fast_cycle", "generic")
NULL, ALT = 0, 1
FAMILY_STREAM = 1 << 30

COLUMNS = ["grid_index", "theta", "Theta", "n", "d", "trials",
           "type1_rate", "type1_ci_low", "type1_ci_high",
           "type2_rate", "type2_ci_low", "type2_ci_high",
           "error_sum", "sufficient_condition", "power_condition"]
PHASE_COLUMNS = ["grid_index", "theta", "Theta", "n", "d", "trials", "type1_rate", "type2_rate",
                 "error_sum", "sufficient_condition", "lb_verdict", "ub_verdict"]


# ------------------------------------------------------------------ config

@dataclass
class ExperimentConfig:
    family: dict
    test: dict
    sweep: dict
    trials: int
    master_seed: int
    model_class: str = "simple-ferro"
    sampler: dict = field(default_factory=lambda: {"kind": "exact"})
    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.test.get("name") not in TESTS:
            raise ValueError(f"test name must be one of {TESTS}")
        if self.model_class not in ("simple-ferro", "ferro", "general"):
            raise ValueError("model_class must be simple-ferro, ferro or general")
        for key in ("theta", "n", "d"):
            if not self.sweep.get(key):
                raise ValueError(f"sweep grid '{key}' must be nonempty")
        if "Theta" in self.sweep and self.sweep["Theta"] is not None and not self.sweep["Theta"]:
            raise ValueError("sweep grid 'Theta' must be nonempty when given")
        kind = self.sampler.get("kind", "exact")
        if kind not in ("exact", "gibbs"):
            raise ValueError("sampler kind must be exact or gibbs")
        if kind == "exact" and max(self.sweep["d"]) > SAMPLE_GUARD:
            raise ValueError(f"exact sampler requires d <= {SAMPLE_GUARD}")
        if {"null", "alt"} - set(self.family):
            raise ValueError("family needs 'null' and 'alt' graph specs")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {"family", "test", "sweep", "trials", "master_seed", "model_class", "sampler", "bounds"}
        extra = set(raw) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        missing = {"family", "test", "sweep", "trials", "master_seed"} - set(raw)
        if missing:
            raise ValueError(f"missing config keys {sorted(missing)}")
        return cls(**raw)

    def grid(self) -> list[tuple[float, float, int, int]]:
        thetas = [float(x) for x in self.sweep["theta"]]
        Thetas = self.sweep.get("Theta")
        ns = [int(x) for x in self.sweep["n"]]
        ds = [int(x) for x in self.sweep["d"]]
        out = []
        for th, n, d in itertools.product(thetas, ns, ds):
            for Th in ([th] if not Thetas else [float(x) for x in Thetas]):
                if Th >= th:
                    out.append((th, Th, n, d))
        if not out:
            raise ValueError("sweep grid is empty after requiring Theta >= theta")
        return out


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


# --------------------------------------------------------------- families

def build_graph(spec: dict, d: int | None = None) -> Graph:
    """Graph from a JSON construction spec, padded with isolated vertices
    up to d (no padding when d is None). Vertex labels in specs are 1-based."""
    kind = spec["kind"]
    if "k" not in spec and d is None and kind not in ("biclique", "turan_h0", "disjoint"):
        raise ValueError(f"construction {kind!r} needs a size 'k'")
    k = int(spec.get("k", d or 0))
    if kind == "empty":
        g = gr.empty_graph(k)
    elif kind == "path":
        g = gr.path_graph(k)
    elif kind == "cycle":
        g = gr.cycle_graph(k)
    elif kind == "star":
        g = gr.star_graph(k)
    elif kind == "clique":
        g = gr.clique_graph(range(k), k)
    elif kind == "biclique":
        g = gr.biclique(int(spec["l"]), int(spec["r"]))
    elif kind == "edges":
        g = Graph(k, frozenset((int(a) - 1, int(b) - 1) for a, b in spec["edges"]))
    elif kind == "disjoint":
        g = gr.disjoint_union(*(build_graph(p) for p in spec["parts"]))
    elif kind == "two_cycles_with_rungs":
        g, rungs = gr.two_cycles_with_rungs(k)
        for j in spec.get("rungs", []):
            g = g.add_edge(*rungs[int(j)])
    elif kind == "turan_h0":
        g, extra = gr.turan_h0(int(spec["s"]), int(spec["m"]))
        if spec.get("extra"):
            g = g.add_edge(*extra)
    elif kind == "clique_chain_with_path":
        g = gr.clique_chain_with_path(k, int(spec["s"]))
    elif kind == "repeated_motif":
        motif = build_graph(spec["motif"])
        extra = spec.get("extra_edge")
        if extra == "designated":
            _, e = gr.turan_h0(int(spec["motif"]["s"]), int(spec["motif"]["m"]))
        elif extra is not None:
            e = (int(extra[0]) - 1, int(extra[1]) - 1)
        else:
            e = None
        g = gr.repeated_motif(motif, k, e, int(spec.get("block", 0)))
    else:
        raise ValueError(f"unknown construction {kind!r}")
    if d is None:
        return g
    if g.d > d:
        raise ValueError(f"construction {kind!r} needs {g.d} vertices, d={d}")
    return gr.pad(g, d)


def build_model(spec: dict, theta: float, Theta: float, d: int, model_class: str,
                rng: np.random.Generator) -> IsingModel:
    """Attach weights to the construction. spec['weights'] may hold
    'magnitude' (low | mid | high | random | number, in units of theta) and
    'signs' (plus | alternate | random | list of +1/-1, edge order)."""
    g = build_graph(spec, d)
    ws = spec.get("weights", {})
    top = Theta / theta if theta > 0 else 1.0
    edges = g.sorted_edges()
    mag = ws.get("magnitude", "low" if model_class == "simple-ferro" else "high")
    if mag == "low":
        mags = np.ones(len(edges))
    elif mag == "high":
        mags = np.full(len(edges), top)
    elif mag == "mid":
        mags = np.full(len(edges), (1 + top) / 2)
    elif mag == "random":
        mags = rng.uniform(1.0, top, len(edges))
    else:
        mags = np.full(len(edges), float(mag))
    signs = ws.get("signs", "plus")
    if signs == "plus":
        sg = np.ones(len(edges))
    elif signs == "alternate":
        sg = np.array([(-1.0) ** i for i in range(len(edges))])
    elif signs == "random":
        sg = rng.choice([-1.0, 1.0], len(edges))
    else:
        sg = np.array([float(x) for x in signs])
        if sg.size != len(edges):
            raise ValueError("sign list length must match the edge count")
    if model_class != "general" and np.any(sg < 0):
        raise ValueError("negative weights need model_class 'general'")
    if model_class == "simple-ferro" and np.any(mags != 1.0):
        raise ValueError("simple-ferro models have unit weights")
    wg = WeightedGraph(g, {e: float(s * m) for e, s, m in zip(edges, sg, mags)})
    return IsingModel(theta, wg)


# ----------------------------------------------------------------- running

def _threads() -> int:
    raw = os.environ.get("ISING_PROPTEST_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError("ISING_PROPTEST_THREADS must be a positive integer") from None


def run_test(test: dict, data, theta: float, Theta: float):
    name, delta = test["name"], float(test.get("delta", 0.05))
    if name == "connectivity":
        return connectivity_test(data, theta, delta)
    if name == "cycle":
        return cycle_test(data, theta, Theta, delta)
    if name == "clique":
        return clique_size_test(data, theta, int(test["m"]), delta, test.get("s"), Theta)
    if name == "fast_cycle":
        return fast_cycle_test(data, theta, Theta, delta, test.get("s"))
    if name == "generic":
        cfg = GeneralTestConfig(theta, Theta, delta, test.get("s"), test.get("rho"))
        return generic_test(data, cfg, test["property"], signed=test.get("signed", True))
    raise ValueError(f"unknown test {name!r}")


def condition_flags(test: dict, theta: float, Theta: float, n: int, d: int) -> dict:
    name, delta = test["name"], float(test.get("delta", 0.05))
    t = tau(n, d, delta)
    s = test.get("s")
    if name == "connectivity":
        return {"sufficient_condition": connectivity_condition(theta, t)}
    if name == "cycle":
        return {"sufficient_condition": cycle_condition(theta, Theta, t)}
    if name == "clique":
        if s is None:
            return {}
        return {"sufficient_condition": clique_condition(theta, int(test["m"]), int(s), Theta, t)}
    if name == "fast_cycle":
        return fast_cycle_conditions(theta, Theta, t, s)
    if name == "generic":
        return generic_conditions(theta, Theta, t, int(s)) if s is not None else {}
    return {}


def _draw(model: IsingModel, probs, n: int, sampler: dict, seed: int, stream: tuple):
    if sampler.get("kind", "exact") == "exact":
        counts = make_rng(seed, *stream).multinomial(n, probs)
        return StateCounts(model.d, counts, seed, "exact")
    return gibbs_sample(model, n, seed, sampler.get("burn_in"), int(sampler.get("thin", 10)),
                        bool(sampler.get("independent_chains", False)), stream)


@dataclass
class GridRow:
    grid_index: int
    theta: float
    Theta: float
    n: int
    d: int
    trials: int
    type1_errors: int
    type2_errors: int
    conditions: dict

    def rate(self, errors: int) -> tuple[float, float, float]:
        lo, hi = proportion_confint(errors, self.trials, alpha=0.05, method="wilson")
        rate = errors / self.trials
        # clamp: the closed form can land one ulp outside [0, 1]
        return rate, max(0.0, min(float(lo), rate)), min(1.0, max(float(hi), rate))

    @property
    def type1_rate(self) -> float:
        return self.type1_errors / self.trials

    @property
    def type2_rate(self) -> float:
        return self.type2_errors / self.trials


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list[GridRow]

    def to_csv(self) -> str:
        lines = [",".join(COLUMNS)]
        for r in self.rows:
            r1, l1, h1 = r.rate(r.type1_errors)
            r2, l2, h2 = r.rate(r.type2_errors)
            vals = [r.grid_index, r.theta, r.Theta, r.n, r.d, r.trials, r1, l1, h1, r2, l2, h2,
                    r1 + r2, r.conditions.get("sufficient_condition"),
                    r.conditions.get("power_condition")]
            lines.append(",".join(_fmt(v) for v in vals))
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "na"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _errors(cfg: ExperimentConfig, gi: int, side: int, model: IsingModel, theta: float,
            Theta: float, n: int, pool) -> int:
    probs = state_probabilities(model) if cfg.sampler.get("kind", "exact") == "exact" else None
    wrong = NULL if side == ALT else 1        # the psi value that counts as an error

    def one(trial: int) -> int:
        data = _draw(model, probs, n, cfg.sampler, cfg.master_seed, (gi, side, trial))
        return int(run_test(cfg.test, data, theta, Theta).psi == wrong)

    if pool is None:
        return sum(one(t) for t in range(cfg.trials))
    return sum(pool.map(one, range(cfg.trials)))


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    rows = []
    threads = _threads()
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for gi, (theta, Theta, n, d) in enumerate(cfg.grid()):
            models = []
            for side, key in ((NULL, "null"), (ALT, "alt")):
                rng = make_rng(cfg.master_seed, gi, side, FAMILY_STREAM)
                models.append(build_model(cfg.family[key], theta, Theta, d, cfg.model_class, rng))
            e1 = _errors(cfg, gi, NULL, models[NULL], theta, Theta, n, pool)
            e2 = _errors(cfg, gi, ALT, models[ALT], theta, Theta, n, pool)
            rows.append(GridRow(gi, theta, Theta, n, d, cfg.trials, e1, e2,
                                condition_flags(cfg.test, theta, Theta, n, d)))
    finally:
        if pool is not None:
            pool.shutdown()
    return ExperimentReport(cfg, rows)


def bound_verdicts(cfg: ExperimentConfig, theta: float, n: int, d: int) -> tuple:
    """(lb_verdict, ub_verdict): True means the signal-strength bounds say
    testing is impossible at this theta; None when no bound applies."""
    kappa = float(cfg.bounds.get("kappa", 2.0))
    name = cfg.test["name"]
    if name == "connectivity":
        v = example_bounds("connectivity", n, d, theta, kappa)
        return v[0].condition_holds, None
    if name in ("cycle", "fast_cycle") or (name == "generic" and cfg.test.get("property") == "cycle"):
        if d < 6:
            return None, None
        v = example_bounds("cycle", n, d, theta, kappa)
        return v[0].condition_holds, v[1].condition_holds
    if name == "clique" and cfg.test.get("s") is not None:
        v = example_bounds("clique", n, d, theta, kappa, s=int(cfg.test["s"]), m=int(cfg.test["m"]),
                           constant=float(cfg.bounds.get("constant", 1.0)))
        return v[0].condition_holds, v[1].condition_holds
    return None, None


def phase_sweep(cfg: ExperimentConfig) -> str:
    if not cfg.sweep.get("theta"):
        raise ValueError("phase sweep needs a nonempty theta grid")
    report = run_experiment(cfg)
    lines = [",".join(PHASE_COLUMNS)]
    for r in report.rows:
        lb, ub = bound_verdicts(cfg, r.theta, r.n, r.d)
        vals = [r.grid_index, r.theta, r.Theta, r.n, r.d, r.trials, r.type1_rate, r.type2_rate,
                r.type1_rate + r.type2_rate, r.conditions.get("sufficient_condition"), lb, ub]
        lines.append(",".join(_fmt(v) for v in vals))
    return "\n".join(lines) + "\n"


def write_csv(text: str, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


# --------------------------------------------------------------------- CLI

def _model_from_file(path, theta: float) -> IsingModel:
    g = gr.read_graph(path)
    wg = g if isinstance(g, WeightedGraph) else WeightedGraph.uniform(g)
    return IsingModel(theta, wg)


def _cmd_sample(a) -> int:
    from .ising_core import exact_sample, write_batch
    model = _model_from_file(a.graph, a.theta)
    if a.sampler == "exact":
        batch = exact_sample(model, a.n, a.seed)
    else:
        batch = gibbs_sample(model, a.n, a.seed, a.burn_in, a.thin, a.independent_chains)
    write_batch(batch, a.out)
    return 0


def _cmd_test(a) -> int:
    from .ising_core import read_batch
    batch = read_batch(a.batch)
    Theta = a.Theta if a.Theta is not None else a.theta
    spec = {"name": a.name, "delta": a.delta, "m": a.m, "s": a.s,
            "property": a.property, "rho": a.rho}
    if a.name == "clique" and a.m is None:
        raise ValueError("test clique: --m is required")
    if a.name == "generic" and a.property is None:
        raise ValueError("test generic: --property is required")
    rep = run_test(spec, batch, a.theta, Theta)
    if hasattr(rep, "as_text"):
        sys.stdout.write(rep.as_text())
    else:
        sys.stdout.write(f"psi={rep.psi}\ndiscrepancy={rep.discrepancy:.17g}\nrho={rep.rho:.17g}\n")
        for k, v in rep.conditions.items():
            sys.stdout.write(f"{k}={v}\n")
        if a.fitted_out and rep.fitted is not None:
            gr.write_graph(rep.fitted.model.wg, a.fitted_out)
    return 0


def _cmd_experiment(a) -> int:
    cfg = load_config(a.config)
    text = phase_sweep(cfg) if a.phase else run_experiment(cfg).to_csv()
    if a.out:
        write_csv(text, a.out)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bounds(a) -> int:
    from .bounds import antiferro_connectivity_ub, detection_impossibility, monotone_ub_theta
    if a.kind in ("connectivity", "cycle", "clique"):
        verdicts = example_bounds(a.kind, a.n, a.d, a.theta, a.kappa, a.s, a.m, a.constant)
    elif a.kind == "detection":
        verdicts = [detection_impossibility(a.n, a.d, a.s, a.eps)]
    elif a.kind == "antiferro":
        verdicts = [antiferro_connectivity_ub(a.theta, a.s, a.n, a.d, a.kappa)]
    else:
        verdicts = [monotone_ub_theta(a.l, a.r, a.n, a.d, a.kappa).verdict(a.theta)]
    sys.stdout.write("bound_name,lhs,rhs,holds\n")
    for v in verdicts:
        sys.stdout.write(v.csv_row() + "\n")
    return 0


def _cmd_oracle(a) -> int:
    from .oracle import SUITES, run_suite
    names = a.suite or sorted(SUITES)
    ok_all = True
    sys.stdout.write("check,passed,worst_margin\n")
    for name in names:
        ok, margin = run_suite(name)
        ok_all &= ok
        sys.stdout.write(f"{name},{str(ok).lower()},{margin:.17g}\n")
    return 0 if ok_all else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ising-proptest",
                                description="Graph property testing for zero-field Ising models")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw a sample batch from a graph file")
    s.add_argument("--graph", required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--sampler", choices=["exact", "gibbs"], default="exact")
    s.add_argument("--burn-in", type=int, default=None)
    s.add_argument("--thin", type=int, default=10)
    s.add_argument("--independent-chains", action="store_true")
    s.set_defaults(func=_cmd_sample)

    t = sub.add_parser("test", help="run a test on a sample batch file")
    t.add_argument("name", choices=list(TESTS))
    t.add_argument("--batch", required=True)
    t.add_argument("--theta", type=float, required=True)
    t.add_argument("--Theta", type=float, default=None)
    t.add_argument("--delta", type=float, default=0.05)
    t.add_argument("--m", type=int, default=None)
    t.add_argument("--s", type=int, default=None)
    t.add_argument("--property", default=None, help="connectivity | cycle | clique:<m>")
    t.add_argument("--rho", type=float, default=None)
    t.add_argument("--fitted-out", default=None, help="write the fitted null model here")
    t.set_defaults(func=_cmd_test)

    e = sub.add_parser("experiment", help="run a Monte Carlo experiment from a JSON config")
    e.add_argument("--config", required=True)
    e.add_argument("--out", default=None)
    e.add_argument("--phase", action="store_true", help="emit the phase-sweep table")
    e.set_defaults(func=_cmd_experiment)

    b = sub.add_parser("bounds", help="evaluate signal-strength bounds as CSV")
    b.add_argument("kind", choices=["connectivity", "cycle", "clique", "detection",
                                    "antiferro", "monotone-upper"])
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--theta", type=float, default=1.0)
    b.add_argument("--kappa", type=float, default=2.0)
    b.add_argument("--s", type=int, default=None)
    b.add_argument("--m", type=int, default=None)
    b.add_argument("--l", type=int, default=None)
    b.add_argument("--r", type=int, default=None)
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--constant", type=float, default=1.0)
    b.set_defaults(func=_cmd_bounds)

    o = sub.add_parser("oracle", help="run brute-force check suites")
    o.add_argument("--suite", action="append", help="suite name; repeatable (default: all)")
    o.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.command == "bounds":
        need = {"clique": ("s", "m"), "detection": ("s",), "antiferro": ("s",),
                "monotone-upper": ("l", "r")}.get(a.kind, ())
        missing = [k for k in need if getattr(a, k) is None]
        if missing:
            parser.error(f"bounds {a.kind} needs " + ", ".join("--" + k for k in missing))
    if a.command == "oracle" and a.suite:
        from .oracle import SUITES
        bad = [x for x in a.suite if x not in SUITES]
        if bad:
            parser.error(f"unknown suite(s) {bad}; choose from {sorted(SUITES)}")
    try:
        return a.func(a)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
