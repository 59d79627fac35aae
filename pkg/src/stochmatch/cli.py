"""Command-line front end.

Subcommands: generate (instances to files), run (one algorithm, one CSV
row plus a per-round report), sweep (grid over R and p or f), replicate
(the bundled replication suites). Data outputs are machine-clean CSV with
a `#` config-echo header; progress goes to stderr. Exit code 1 flags a
configuration error, 2 a runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from stochmatch import bench, suites
from stochmatch.graph import Graph, format_graph, parse_graph_text
from stochmatch.kidney import format_pool, gen_pool
from stochmatch.stochastic import ProbModel, parse_model_text, sample_vertex_params

ENV_SEED = "STOCHMATCH_SEED"


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors are exit 1
        raise ConfigError(message)


def _default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return suites.DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"bad {ENV_SEED} value {raw!r}") from e


def _load_config_file(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln in fh:
                ln = ln.strip()
                if not ln or ln.startswith("#"):
                    continue
                if "=" not in ln:
                    raise ConfigError(f"bad config line {ln!r} (expected key=value)")
                k, v = ln.split("=", 1)
                out[k.strip().replace("-", "_")] = v.strip()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    return out


def _merge_config(args: argparse.Namespace, keys: list[str]) -> None:
    """Apply config-file values for options the command line left unset."""
    if not getattr(args, "config", None):
        return
    cfg = _load_config_file(args.config)
    for k in keys:
        if getattr(args, k, None) is None and k in cfg:
            setattr(args, k, cfg[k])


def make_graph(args) -> Graph:
    fam = args.family
    if fam == "disjoint-edges":
        return bench.gen_disjoint_edges(_int(args.n, "n"))
    if fam == "complete-bipartite":
        return bench.gen_complete_bipartite(_int(args.n, "n"))
    if fam == "erdos-renyi":
        return bench.gen_erdos_renyi(_int(args.n, "n"), _float(args.d, "d"), args.seed)
    if fam == "example31":
        t = _int(args.t, "t")
        R0 = int(args.R0) if args.R0 is not None else suites.example31_budget(3 * t, _model_p(args))
        return bench.gen_example31(t, R0, args.seed)
    if fam == "figure3":
        return bench.gen_figure3(_int(args.t, "t"))
    if fam == "appendixA":
        return bench.gen_appendixA(_int(args.t, "t"), _float(args.beta, "beta"))
    if fam == "single-edge":
        return Graph(2, [(0, 1)], meta={"family": "single-edge", "params": ""})
    if fam == "k22":
        return bench.gen_complete_bipartite(2)
    raise ConfigError(f"unknown family {fam!r}")


def _int(v, name) -> int:
    if v is None:
        raise ConfigError(f"missing required parameter --{name}")
    return int(v)


def _float(v, name) -> float:
    if v is None:
        raise ConfigError(f"missing required parameter --{name}")
    return float(v)


def _model_p(args) -> float:
    model = parse_model_arg(args.model or "uniform:0.5", 1, 1, args.seed)
    return model.p if model.variant == "uniform" else 0.5


def parse_model_arg(spec: str, n: int, m: int, seed: int) -> ProbModel:
    """--model forms: uniform:P | vertexparams:uniform01 |
    vertexparams:constant:C | vertexparams:twopoint:LO:HI:FRAC |
    peredge:PATH | file:PATH."""
    parts = spec.split(":")
    try:
        if parts[0] == "uniform" and len(parts) == 2:
            return ProbModel.uniform(float(parts[1]))
        if parts[0] == "vertexparams":
            if parts[1] == "uniform01":
                return sample_vertex_params(n, "uniform01", seed)
            if parts[1] == "constant":
                return sample_vertex_params(n, ("constant", float(parts[2])), seed)
            if parts[1] == "twopoint":
                return sample_vertex_params(
                    n, ("twopoint", float(parts[2]), float(parts[3]), float(parts[4])), seed
                )
        if parts[0] in ("peredge", "file") and len(parts) == 2:
            with open(parts[1], "r", encoding="utf-8") as fh:
                return parse_model_text(fh.read(), n, m)
    except (ValueError, IndexError, OSError) as e:
        raise ConfigError(f"bad model spec {spec!r}: {e}") from e
    raise ConfigError(f"bad model spec {spec!r}")


_NO_ECHO = {"out", "report", "config", "func", "jobs"}


def _echo_config(args, keys) -> list[str]:
    vals = []
    for k in sorted(keys):
        if k in _NO_ECHO:
            continue
        v = getattr(args, k, None)
        if v is not None:
            vals.append(f"{k}={v}")
    return vals


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_generate(args) -> int:
    _merge_config(args, ["family", "n", "t", "d", "beta", "R0", "k_max", "out"])
    if args.seed is None:
        args.seed = _default_seed()
    args.seed = int(args.seed)
    if args.family == "kidney-pool":
        pool = gen_pool(_int(args.n, "n"), args.seed)
        _write(args.out, format_pool(pool))
        return 0
    g = make_graph(args)
    header = "# " + " ".join(_echo_config(args, ["family", "n", "t", "d", "beta", "R0", "seed"])) + "\n"
    _write(args.out, header + format_graph(g))
    print(f"generated {g!r}", file=sys.stderr)
    return 0


def _load_input_graph(args) -> tuple[Graph, ProbModel | None]:
    if args.input:
        try:
            with open(args.input, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ConfigError(f"cannot read {args.input}: {e}") from e
        g, leftover = parse_graph_text(text)
        inline = parse_model_text(leftover, g.n, g.m) if leftover.strip() else None
        return g, inline
    if args.family:
        return make_graph(args), None
    raise ConfigError("need --input or --family")


_RUN_KEYS = ["family", "input", "model", "alg", "R", "s", "b", "trials", "seed", "n", "t", "d", "beta", "R0", "out", "report"]


def cmd_run(args) -> int:
    _merge_config(args, _RUN_KEYS)
    if args.seed is None:
        args.seed = _default_seed()
    args.seed = int(args.seed)
    g, inline_model = _load_input_graph(args)
    model = inline_model if args.model is None and inline_model is not None else parse_model_arg(
        args.model or "uniform:0.5", g.n, g.m, args.seed
    )
    alg = args.alg
    if alg not in bench.ALGORITHMS:
        raise ConfigError(f"unknown algorithm id {alg!r}; choose from {', '.join(bench.ALGORITHMS)}")
    R = int(args.R) if args.R is not None else 1
    trials = int(args.trials) if args.trials is not None else 100
    params = {}
    if alg == "naive-random":
        params["b"] = _int(args.b, "b")
    if alg == "nonadaptive-strategic":
        if g.meta.get("family") != "figure3":
            raise ConfigError("nonadaptive-strategic needs --family figure3")
        params["selector"] = bench.figure3_selector(g)
    try:
        rec = bench.evaluate(alg, g, model, R, trials, args.seed, alg_params=params)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    comments = _echo_config(args, _RUN_KEYS)
    _write(args.out, bench.format_csv([rec], header_comments=comments))
    if args.report:
        from stochmatch.stochastic import EdgeOracle, sample_realization, trial_seed

        realization = sample_realization(model, g, trial_seed(args.seed, 0))
        oracle = EdgeOracle(g, realization)
        report = bench._run_algorithm(alg, g, oracle, R, args.seed, dict(params))
        _write(args.report, "\n".join(report.to_lines()) + "\n")
    return 0


def _sweep_cell(task):
    args_dict, R, p_or_f = task
    ns = argparse.Namespace(**args_dict)
    g, _ = _load_input_graph(ns)
    model = parse_model_arg(f"uniform:{p_or_f}", g.n, g.m, ns.seed)
    params = {}
    if ns.alg == "naive-random":
        params["b"] = _int(ns.b, "b")
    if ns.alg == "nonadaptive-strategic":
        params["selector"] = bench.figure3_selector(g)
    trials = int(ns.trials) if ns.trials is not None else 100
    return bench.evaluate(ns.alg, g, model, R, trials, ns.seed, alg_params=params, p_or_f=p_or_f)


def _parse_grid(spec: str, name: str) -> list[float]:
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            return [float(x) for x in range(int(lo), int(hi) + 1)]
        return [float(x) for x in spec.split(",")]
    except ValueError as e:
        raise ConfigError(f"bad {name} grid {spec!r}") from e


def cmd_sweep(args) -> int:
    _merge_config(args, _RUN_KEYS + ["p_grid", "R_grid", "jobs"])
    if args.seed is None:
        args.seed = _default_seed()
    args.seed = int(args.seed)
    if args.alg not in bench.ALGORITHMS:
        raise ConfigError(f"unknown algorithm id {args.alg!r}")
    r_grid = [int(x) for x in _parse_grid(args.R_grid or "1..1", "R")]
    p_grid = _parse_grid(args.p_grid, "p") if args.p_grid else [_model_p(args)]
    keys = dict(vars(args))
    keys.pop("func", None)
    tasks = [(keys, R, p) for R in r_grid for p in p_grid]
    jobs = int(args.jobs or 1)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            recs = list(pool.map(_sweep_cell, tasks))
    else:
        recs = [_sweep_cell(t) for t in tasks]
    comments = _echo_config(args, _RUN_KEYS + ["p_grid", "R_grid"])
    _write(args.out, bench.format_csv(recs, header_comments=comments))
    return 0


def cmd_replicate(args) -> int:
    _merge_config(args, ["suite", "trials", "seed", "out", "include_empty"])
    if args.seed is None:
        args.seed = _default_seed()
    args.seed = int(args.seed)
    if args.suite not in suites.SUITES:
        raise ConfigError(f"unknown suite {args.suite!r}; choose from {', '.join(suites.SUITES)}")
    trials = int(args.trials) if args.trials is not None else None
    print(f"replicating {args.suite} (seed {args.seed})", file=sys.stderr)
    recs, extra_cols, comments = suites.run_suite(
        args.suite, seed=args.seed, trials=trials, include_empty=bool(args.include_empty)
    )
    comments = comments + _echo_config(args, ["suite", "trials", "seed"])
    _write(args.out, bench.format_csv(recs, extra_cols=extra_cols, header_comments=comments))
    return 0


def build_parser() -> _Parser:
    ap = _Parser(prog="stochmatch", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file; flags override it")
        p.add_argument("--seed", type=int, default=None, help=f"base seed (default ${ENV_SEED} or {suites.DEFAULT_SEED})")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("generate", help="write an instance file")
    common(p)
    p.add_argument("--family", required=False)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--R0", type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="run one algorithm configuration")
    common(p)
    p.add_argument("--input", help="graph file (may carry an appended model)")
    p.add_argument("--family")
    p.add_argument("--model", help="uniform:P | vertexparams:... | peredge:PATH")
    p.add_argument("--alg", required=False)
    p.add_argument("--R", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--R0", type=int)
    p.add_argument("--report", help="write the per-round run report here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="grid over R and p")
    common(p)
    p.add_argument("--input")
    p.add_argument("--family")
    p.add_argument("--alg", required=False)
    p.add_argument("--R-grid", dest="R_grid", help="e.g. 1..5 or 1,3,5")
    p.add_argument("--p-grid", dest="p_grid", help="e.g. 0.1,0.3,0.5")
    p.add_argument("--model")
    p.add_argument("--b", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--R0", type=int)
    p.add_argument("--jobs", type=int, default=None, help="worker processes over grid cells")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replicate", help="run a bundled replication suite")
    common(p)
    p.add_argument("--suite", required=False, choices=suites.SUITES)
    p.add_argument("--trials", type=int, help="override the suite's trial count")
    p.add_argument("--include-empty", dest="include_empty", action="store_true", default=False)
    p.set_defaults(func=cmd_replicate)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as e:  # runtime failures are exit code 2
        print(f"error: runtime: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
