"""Command-line front end.

Every subcommand resolves a config (parameter file, then flag overrides),
calls the library and formats the result.  Exit codes: 0 when the command
ran, 1 for usage or config errors, 2 when an internal invariant failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from chainlab import complex as cx
from chainlab import expectation as ex
from chainlab import expansion
from chainlab import model
from chainlab import pattern
from chainlab.errors import StructureError, VertexNotFoundError

# config keys read from parameter files; flags use the same names
KEYS = (
    "g", "N", "n", "r", "alpha", "p", "seed", "star", "trials", "event", "m",
    "clique_size", "count", "g_min", "g_max", "n_rule", "alpha_rule", "margin",
    "clique_mode", "workers", "max_stages", "vertices",
)


class ConfigError(ValueError):
    pass


def _resolve(args) -> dict:
    cfg = {}
    if args.params:
        try:
            cfg.update(model.read_param_file(args.params))
        except OSError as e:
            raise ConfigError(f"cannot read parameter file: {e}") from e
    unknown = set(cfg) - set(KEYS)
    if unknown:
        raise ConfigError(f"unknown parameter keys: {', '.join(sorted(unknown))}")
    for k in KEYS:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    return cfg


def _int(cfg, key, default=None):
    v = cfg.get(key)
    if v is None:
        return default
    try:
        return int(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer, got {v!r}") from None


def _float(cfg, key, default=None):
    v = cfg.get(key)
    return default if v is None else float(v)


def _seed(cfg) -> int:
    return _int(cfg, "seed", 0)


def _star(cfg) -> pattern.StarPattern:
    s = cfg.get("star")
    return pattern.DEFAULT_STAR if s is None else pattern.StarPattern.parse(s)


def _vertices(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


class _Out:
    """Collects output; written once so a failed run leaves no partial file."""

    def __init__(self):
        self.buf = io.StringIO()

    def line(self, s: str = "") -> None:
        self.buf.write(s + "\n")

    def json(self, obj) -> None:
        self.buf.write(json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")

    def csv(self, header, rows) -> None:
        w = csv.writer(self.buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])

    def text(self) -> str:
        return self.buf.getvalue()


def _kv(out: _Out, fmt: str, data: dict) -> None:
    if fmt == "json":
        out.json(data)
    elif fmt == "csv":
        out.csv(["key", "value"], [[k, json.dumps(v) if isinstance(v, (list, dict)) else v]
                                   for k, v in data.items()])
    else:
        for k, v in data.items():
            if isinstance(v, list):
                v = " ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            out.line(f"{k} = {v}")


# -- subcommands -------------------------------------------------------------


def cmd_sample(args, cfg) -> tuple[_Out, _Out | None]:
    params = model.params_from_config(cfg)
    seed = _seed(cfg)
    K = model.sample_complex(params, seed)
    body = _Out()
    body.buf.write(cx.format_complex(K))
    summary = _Out()
    summary.line(f"# seed = {seed}")
    summary.line("# f = " + " ".join(map(str, cx.f_vector(K))))
    return body, summary


def _params_dict(params: model.ModelParams) -> dict:
    return {"g": params.g, "n": params.n, "N": params.N, "r": params.r,
            "alpha": list(params.alpha) if params.alpha is not None else None,
            "p": list(params.p)}


def cmd_check(args, cfg):
    params = model.params_from_config(cfg)
    rep = model.check_conditions(params)
    data = _params_dict(params)
    data.update({
        "hyperbolic_connected_gt": rep.hyperbolic_connected_gt,
        "hyperbolic_connected_lt": rep.hyperbolic_connected_lt,
        "technical": rep.technical,
        "critical_dimension": "none" if rep.critical_dimension_k is None else rep.critical_dimension_k,
        "critical_candidates": list(rep.critical_candidates),
        "chain_domain_4g+2": rep.chain_domain,
        "psi": list(rep.psi_values),
    })
    if data["alpha"] is None:
        del data["alpha"]
    out = _Out()
    _kv(out, args.format, data)
    return out, None


def cmd_expand(args, cfg):
    K = cx.read_complex(args.complex)
    if args.vertices_file:
        with open(args.vertices_file, encoding="utf-8") as fh:
            rows = [ln.split("#", 1)[0].strip() for ln in fh]
        rows = [r for r in rows if r]
        cfg["vertices"] = rows[0] if rows else ""
    if cfg.get("vertices") is None:
        raise ConfigError("expand needs --vertices or --vertices-file")
    Y = _vertices(cfg["vertices"])
    for v in Y:
        if not 0 <= v < K.N:
            raise ConfigError(f"vertex {v} out of range 0..{K.N - 1}")
    trace = expansion.expand_to_fixpoint(K, Y, _int(cfg, "max_stages"))
    out = _Out()
    if args.format == "json":
        out.json({
            "stages": [sorted(s) for s in trace.stages],
            "added": [{str(v): sorted(a) for v, a in sorted(w.items())} for w in trace.witnesses],
            "truncated": trace.truncated,
            "seed": trace.exhausted,
        })
    elif args.format == "csv":
        out.csv(["stage", "vertices", "added"], [
            [k, " ".join(map(str, sorted(s))), " ".join(str(v) for v in sorted(w))]
            for k, (s, w) in enumerate(zip(trace.stages, trace.witnesses))
        ])
    else:
        for ln in trace.lines():
            out.line(ln)
        out.line(f"truncated = {trace.truncated}")
        out.line(f"seed = {trace.exhausted}")
    return out, None


def cmd_count(args, cfg):
    K = cx.read_complex(args.complex)
    g = _int(cfg, "g", 1)
    res = pattern.count_pattern_occurrences(K, g, _int(cfg, "clique_size"))
    out = _Out()
    _kv(out, args.format, {"g": res.g, "clique_size": res.clique_size, "raw": res.raw,
                           "labeled": res.labeled, "inside_clique": res.inside_clique})
    return out, None


def _mc_args(cfg) -> dict:
    event = cfg.get("event", "sandwich")
    kw = {}
    if event == "clique_count" and cfg.get("m") is not None:
        kw["m"] = _int(cfg, "m")
    if event == "pattern_count":
        kw["clique_size"] = _int(cfg, "clique_size")
        kw["count"] = cfg.get("count", "labeled")
    return kw


def cmd_mc(args, cfg):
    event = cfg.get("event", "sandwich")
    if event not in ex.EVENTS:
        raise ConfigError(f"unknown event {event!r}; expected one of {', '.join(ex.EVENTS)}")
    if event == "sandwich" and cfg.get("N") is None and cfg.get("n") is None:
        cfg["N"] = 2 * _int(cfg, "g", 1) + 4
    params = model.params_from_config(cfg)
    trials = _int(cfg, "trials", 10000)
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    seed = _seed(cfg)
    kw = _mc_args(cfg)
    est = ex.mc_estimate(event, params, trials, seed, workers=_int(cfg, "workers", 1), **kw)
    target = ex.closed_form_mean(event, params, **kw)
    data = {"event": event, "seed": seed, "trials": trials, "mean": est.mean,
            "variance": est.variance, "stderr": est.stderr}
    if target is None:
        data["closed_form"] = "none"
        data["verdict"] = "n/a"
    else:
        data["closed_form"] = target
        data["deviation_in_stderr"] = (
            abs(est.mean - target) / est.stderr if est.stderr > 0 else (0.0 if est.mean == target else float("inf"))
        )
        data["verdict"] = "PASS" if est.within(target, 4.0) else "FAIL"
    out = _Out()
    _kv(out, args.format, data)
    return out, None


def cmd_sweep(args, cfg):
    g_min, g_max = _int(cfg, "g_min", 2), _int(cfg, "g_max", 10)
    if g_min < 1 or g_max < g_min:
        raise ConfigError(f"bad genus range {g_min}..{g_max}")
    rule = cfg.get("alpha_rule", "technical")
    if rule == "technical":
        alpha = None
    elif rule == "fixed":
        if cfg.get("alpha") is None:
            raise ConfigError("alpha_rule=fixed needs alpha")
        alpha = model.parse_floats(cfg["alpha"])
    else:
        raise ConfigError(f"unknown alpha rule {rule!r}; expected technical or fixed")
    reps = ex.sweep(range(g_min, g_max + 1), n_rule=cfg.get("n_rule", "feasible"),
                    margin=_float(cfg, "margin", 0.01), alpha=alpha,
                    clique_mode=cfg.get("clique_mode", "printed"))
    out = _Out()
    if args.format == "json":
        out.json([r.as_dict() for r in reps])
    else:
        out.csv(ex.SWEEP_COLUMNS, [ex.report_row(r) for r in reps])
    return out, None


def cmd_chain(args, cfg):
    K = cx.read_complex(args.complex)
    if cfg.get("vertices") is None:
        raise ConfigError("chain needs --vertices")
    seq = _vertices(cfg["vertices"])
    star = _star(cfg)
    k = len(seq)
    pairs = {}
    for i in range(k):
        a, b = seq[i], seq[(i + 1) % k]
        pairs[f"{a}->{b}"] = pattern.intersection_one(K, a, b, star)
        pairs[f"{b}->{a}"] = pattern.intersection_one(K, b, a, star)
    data = {"star": str(star), "sequence": seq, "closed_chain": pattern.is_closed_chain(K, seq, star)}
    data.update({f"intersection_one {k}": v for k, v in pairs.items()})
    out = _Out()
    _kv(out, args.format, data)
    return out, None


def cmd_pattern(args, cfg):
    g = _int(cfg, "g", 1)
    P = pattern.build_pattern(g, _int(cfg, "r"))
    out = _Out()
    out.buf.write(cx.format_complex(P.B if args.which == "B" else P.A))
    return out, None


COMMANDS = {
    "sample": (cmd_sample, "draw one complex and write it in the text format"),
    "check": (cmd_check, "evaluate the parameter conditions"),
    "expand": (cmd_expand, "iterate rigid expansion from a vertex set"),
    "count": (cmd_count, "count pattern occurrences in a complex file"),
    "mc": (cmd_mc, "Monte Carlo estimate against its closed form"),
    "sweep": (cmd_sweep, "expectation terms per genus as CSV rows"),
    "chain": (cmd_chain, "test a vertex sequence for the closed-chain relations"),
    "pattern": (cmd_pattern, "write the pattern graph A or flag complex B"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    c = common.add_argument_group("parameters (override the parameter file)")
    common.add_argument("--params", metavar="FILE", help="key = value parameter file")
    common.add_argument("-o", "--output", metavar="FILE", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("text", "csv", "json"),
                        help="default: csv for sweep, text otherwise")
    c.add_argument("--g", type=int)
    c.add_argument("--N", type=int)
    c.add_argument("--n", type=float)
    c.add_argument("--r", type=int)
    c.add_argument("--alpha", help="exponents, e.g. '0.85 0.1 0'")
    c.add_argument("--p", help="probabilities, e.g. '0.9 0.5'")
    c.add_argument("--seed", type=int)
    c.add_argument("--star", help="intersection-one pattern, e.g. '1-3 3-5 5-2 2-4 4-1'")

    parser = argparse.ArgumentParser(prog="chainlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sps = {name: sub.add_parser(name, parents=[common], help=h) for name, (_, h) in COMMANDS.items()}

    for name in ("expand", "count", "chain"):
        sps[name].add_argument("complex", help="complex in the text format")
    sps["expand"].add_argument("--vertices", help="starting vertex set, e.g. '0 1 2'")
    sps["chain"].add_argument("--vertices", help="cyclic vertex sequence, e.g. '0 1 2 3'")
    sps["expand"].add_argument("--vertices-file", help="file whose first line is the vertex set")
    sps["expand"].add_argument("--max-stages", dest="max_stages", type=int)
    sps["count"].add_argument("--clique-size", dest="clique_size", type=int)
    mc = sps["mc"]
    mc.add_argument("--event", choices=ex.EVENTS)
    mc.add_argument("--trials", type=int)
    mc.add_argument("--m", type=int, help="clique size for clique_count")
    mc.add_argument("--clique-size", dest="clique_size", type=int)
    mc.add_argument("--count", choices=("labeled", "raw", "inside_clique"))
    mc.add_argument("--workers", type=int)
    sw = sps["sweep"]
    sw.add_argument("--g-min", dest="g_min", type=int)
    sw.add_argument("--g-max", dest="g_max", type=int)
    sw.add_argument("--n-rule", dest="n_rule", choices=ex.N_RULES)
    sw.add_argument("--alpha-rule", dest="alpha_rule", choices=("technical", "fixed"))
    sw.add_argument("--margin", type=float)
    sw.add_argument("--clique-mode", dest="clique_mode", choices=("printed", "faces"))
    sps["pattern"].add_argument("--which", choices=("A", "B"), default="B")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    func = COMMANDS[args.command][0]
    if args.format is None:
        args.format = "csv" if args.command == "sweep" else "text"
    try:
        cfg = _resolve(args)
        body, extra = func(args, cfg)
    except (ConfigError, StructureError, VertexNotFoundError, ValueError, KeyError, OSError) as e:
        print(f"chainlab {args.command}: error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # anything else is a bug or a broken invariant
        print(f"chainlab {args.command}: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body.text())
        if extra is not None:
            sys.stdout.write(extra.text())
    else:
        sys.stdout.write(body.text())
        if extra is not None:
            sys.stdout.write(extra.text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
