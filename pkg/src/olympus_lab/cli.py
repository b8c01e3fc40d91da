"""``olympus-lab`` command line.

Each run writes its payload files and a ``manifest.json`` into a run
directory (``--run-dir``, or a name derived from the subcommand, seed and
parameters under ``--out-root`` / ``$OLYMPUS_LAB_OUT``).

Exit codes: 0 ok, 2 usage error, 3 data error, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, ca, evolver, neutral, results, rules, sampling, timeseries
from .ca import FitnessEstimate, RuleTable
from .errors import DegenerateVariance, DomainError, InsufficientData, NonConvergence

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


# -- argument helpers ---------------------------------------------------------

def parse_rule(text: str) -> RuleTable:
    """Catalog name, 32-digit hex, 128-char bit string, or a file holding one of those."""
    t = text.strip()
    for cat in (rules.BLOK, rules.BLOK_PRIME):
        if t in cat.names:
            return cat[t]
    p = Path(t)
    if p.is_file():
        t = p.read_text(encoding="utf-8").strip()
    return RuleTable.parse(t)


def _anchor(spec: str):
    """``rule:<name|hex>``, ``nearest:blok|blok-prime`` or ``centroid:blok|blok-prime``."""
    kind, _, arg = spec.partition(":")
    cats = {"blok": rules.BLOK, "blok-prime": rules.BLOK_PRIME}
    if kind == "rule":
        return parse_rule(arg)
    if kind in ("nearest", "centroid"):
        if arg not in cats:
            raise UsageError(f"unknown catalog {arg!r}")
        return cats[arg] if kind == "nearest" else rules.centroid(cats[arg])
    raise UsageError(f"bad anchor {spec!r}")


def _seed(v: str) -> int:
    try:
        s = int(v)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer") from None
    if s < 0:
        raise argparse.ArgumentTypeError("seed must be a non-negative integer")
    return s


def _positive(v: str) -> int:
    n = int(v)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="olympus-lab", description=__doc__.split("\n")[0],
                formatter_class=argparse.RawDescriptionHelpFormatter,
                epilog="Exit codes: 0 ok, 2 usage, 3 data error, 4 numeric failure.")
    p.add_argument("--out-root", help="root for run directories (default $OLYMPUS_LAB_OUT or ./olympus-lab-out)")
    p.add_argument("--run-dir", help="explicit run directory")
    p.add_argument("--threads", type=_positive, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def stochastic(sp, ics=10_000, required=True):
        sp.add_argument("--seed", type=_seed, required=required,
                        help="master seed (mandatory)" if required else "master seed (needed with --sample)")
        sp.add_argument("--ics", type=_positive, default=ics, help=f"ICs per evaluation (default {ics})")
        sp.add_argument("--max-steps", type=_positive, default=None, help="CA step budget (default 2N)")

    sp = sub.add_parser("eval", help="standard performance of one rule; JSON {rule,k,n,f,stderr}")
    sp.add_argument("--rule", required=True)
    stochastic(sp)

    sp = sub.add_parser("dos", help="density of states under uniform sampling; dos.csv: bin_lo,bin_hi,count")
    sp.add_argument("--space", choices=["full", "olympus"], default="full")
    sp.add_argument("--samples", type=int, default=4000)
    stochastic(sp)

    sp = sub.add_parser("mh-sample", help="Metropolis-Hastings sample; points.csv: index,rule,k,n,f")
    sp.add_argument("--space", choices=["full", "olympus"], default="full")
    sp.add_argument("--samples", type=_positive, default=4000)
    stochastic(sp)

    def point_source(sp):
        sp.add_argument("--points", help="points.csv from dos/mh-sample")
        sp.add_argument("--sample", choices=["uniform-full", "uniform-olympus", "mh", "csample"],
                        help="draw a fresh sample instead of --points")
        sp.add_argument("--size", type=_positive, default=4000)

    sp = sub.add_parser("fdc", help="fitness-distance correlation; fdc.csv: f,d")
    point_source(sp)
    sp.add_argument("--anchor", default="centroid:blok-prime",
                    help="rule:<name|hex> | nearest:blok|blok-prime | centroid:blok|blok-prime")
    stochastic(sp, required=False)

    sp = sub.add_parser("cloud", help="fitness cloud and NSC; cloud.csv: parent,offspring; nsc.csv: M,N,count,slope")
    point_source(sp)
    sp.add_argument("--operator", choices=[o.value for o in sampling.Operator], default="one-bit-flip")
    sp.add_argument("--bins", type=int, default=10)
    sp.add_argument("--min-occupancy", type=int, default=5)
    stochastic(sp)

    sp = sub.add_parser("neutral-walk", help="neutral walk; walk.csv: step,rule,k,n,f,distance[,degree]")
    sp.add_argument("--start", required=True, help="0.5004 | 0.7645 | rule")
    sp.add_argument("--scan", action="store_true", help="evaluate full neighbourhoods (degrees, innovation)")
    stochastic(sp)

    sp = sub.add_parser("horizon", help="evolvability horizon; horizon.csv: position,f")
    sp.add_argument("--rule", required=True)
    stochastic(sp)

    sp = sub.add_parser("per-bit", help="per-bit evolvability; per_bit.csv: rank,bit,mean,sd")
    sp.add_argument("--catalog", choices=["blok", "blok-prime"], default="blok")
    stochastic(sp)

    sp = sub.add_parser("walk", help="random walk; walk.csv: t,f; acf.csv: lag,acf,pacf,band")
    sp.add_argument("--space", choices=["full", "olympus"], default="olympus")
    sp.add_argument("--length", type=int, default=1000)
    sp.add_argument("--max-lag", type=_positive, default=None)
    stochastic(sp, ics=1000)

    sp = sub.add_parser("arma", help="ARMA fit of a walk.csv; JSON model report, ljung_box.csv: h,Q,p")
    sp.add_argument("--trace", required=True, help="walk.csv from the walk subcommand")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--h", type=int, default=20, help="largest Ljung-Box lag")
    sp.add_argument("--identify", action="store_true", help="rank all orders up to --p-max/--q-max")
    sp.add_argument("--p-max", type=int, default=3)
    sp.add_argument("--q-max", type=int, default=2)

    sp = sub.add_parser("olympus", help="schema and coordinate tools")
    osub = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    osub.add_parser("info", help="schemata, joint bits, distance matrices")
    e = osub.add_parser("embed", help="77 free bits (bit string or 20 hex digits) -> rule hex")
    e.add_argument("bits")
    pr = osub.add_parser("project", help="rule -> 77 free bits")
    pr.add_argument("rule")

    sp = sub.add_parser("ga", help="genetic algorithms on the Olympus")
    gsub = sp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    g = gsub.add_parser("run", help="one run; JSON-lines log, one record per generation")
    g.add_argument("--variant", choices=[v.value for v in evolver.Variant], required=True)
    g.add_argument("--preset", choices=["paper", "desk"], default="desk")
    g.add_argument("--seed", type=_seed, required=True)
    g.add_argument("--generations", type=_positive, default=None, help="override the preset")
    g.add_argument("--pop-size", type=_positive, default=None)
    g.add_argument("--out", help="log file (default <run-dir>/run.jsonl)")
    g = gsub.add_parser("report", help="aggregate run logs; ga_report.csv")
    g.add_argument("logs", nargs="+")
    g.add_argument("--thresholds", default="0.80,0.82,0.84")

    sp = sub.add_parser("report", help="validate a run directory; --verify re-runs it from the manifest")
    sp.add_argument("dir")
    sp.add_argument("--verify", action="store_true")
    return p


# -- commands -----------------------------------------------------------------

def _est(e: FitnessEstimate) -> dict:
    return {"k": e.k, "n": e.n, "f": e.value, "stderr": e.stderr}


def _points_rows(points):
    return [(i, r.to_hex(), e.k, e.n, e.value) for i, (r, e) in enumerate(points)]


def _read_points(path):
    _, header, rows = results.read_csv(path, "points")
    col = {h: i for i, h in enumerate(header)}
    return [(RuleTable.from_hex(r[col["rule"]]), FitnessEstimate(int(r[col["k"]]), int(r[col["n"]])))
            for r in rows]


def _points(a, inputs):
    if a.points:
        inputs.append(a.points)
        return _read_points(a.points)
    if a.sample is None:
        raise UsageError("give --points or --sample")
    if a.seed is None:
        raise UsageError("--sample needs --seed")
    if a.sample == "mh":
        return sampling.metropolis_hastings_sample(a.size, a.ics, a.seed, max_steps=a.max_steps)
    if a.sample == "csample":
        return sampling.csample_points(a.size, a.ics, a.seed, max_steps=a.max_steps)
    space = a.sample.split("-")[1]
    return sampling.uniform_sample(space, a.size, a.ics, a.seed, a.max_steps)


def cmd_eval(a, out, inputs):
    rule = parse_rule(a.rule)
    e = ca.evaluate(rule, a.ics, a.seed, a.max_steps)
    doc = {"rule": rule.to_hex(), **_est(e)}
    results.write_json(out / "eval.json", "eval", doc)
    return doc


def cmd_dos(a, out, inputs):
    hist, points = sampling.dos_uniform(a.space, a.samples, a.ics, a.seed, a.max_steps)
    e = hist.edges
    results.write_csv(out / "dos.csv", "dos", ["bin_lo", "bin_hi", "count"],
                      [(float(e[i]), float(e[i + 1]), int(c)) for i, c in enumerate(hist.counts) if c])
    results.write_csv(out / "points.csv", "points", ["index", "rule", "k", "n", "f"], _points_rows(points))
    results.emit_plot(out, "dos", "histogram", "dos.csv")
    doc = {"space": a.space, "samples": hist.total, "zero_share": hist.zero_share(),
           "bin_width": hist.bin_width}
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def cmd_mh(a, out, inputs):
    st = {}
    pts = sampling.metropolis_hastings_sample(a.samples, a.ics, a.seed, a.space, a.max_steps, st)
    results.write_csv(out / "points.csv", "points", ["index", "rule", "k", "n", "f"], _points_rows(pts))
    f = np.array([e.value for _, e in pts])
    hist = sampling.FitnessHistogram.from_values(f, 1.0 / a.ics)
    e = hist.edges
    results.write_csv(out / "dos.csv", "dos", ["bin_lo", "bin_hi", "count"],
                      [(float(e[i]), float(e[i + 1]), int(c)) for i, c in enumerate(hist.counts) if c])
    results.emit_plot(out, "dos", "histogram", "dos.csv")
    doc = {"samples": len(pts), "proposals": st["proposals"], "zero_count": int((f == 0).sum()),
           "zero_share": float((f == 0).mean())}
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def cmd_fdc(a, out, inputs):
    pts = _points(a, inputs)
    anchor = _anchor(a.anchor)
    d = sampling.distances([r for r, _ in pts], anchor)
    f = [e.value for _, e in pts]
    results.write_csv(out / "fdc.csv", "fdc", ["f", "d"], zip(f, d.tolist()))
    results.emit_plot(out, "fdc", "scatter", "fdc.csv", x=2, y=1, xlabel="distance", ylabel="fitness")
    doc = {"anchor": a.anchor, "points": len(pts), "fdc": sampling.fdc(pts, anchor)}
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def cmd_cloud(a, out, inputs):
    pts = _points(a, inputs)
    cl = sampling.fitness_cloud(pts, a.operator, a.ics, a.seed, a.max_steps)
    results.write_csv(out / "cloud.csv", "cloud", ["parent", "offspring"],
                      zip(cl.parent.tolist(), cl.offspring.tolist()))
    rep = sampling.nsc(cl, a.bins, a.min_occupancy)
    slopes = list(rep.slopes.tolist()) + [""]
    results.write_csv(out / "nsc.csv", "nsc", ["M", "N", "count", "slope"],
                      zip(rep.m.tolist(), rep.n.tolist(), rep.counts.tolist(), slopes))
    results.emit_plot(out, "cloud", "cloud", "cloud.csv", segments="nsc.csv")
    doc = {"operator": a.operator, "points": len(cl), "nsc": rep.nsc, "bins": len(rep.counts)}
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def cmd_neutral_walk(a, out, inputs):
    starts = {f"{k}": v for k, v in rules.NEUTRAL_WALK_STARTS.items()}
    start = starts[a.start] if a.start in starts else parse_rule(a.start)
    if isinstance(start, str):
        start = RuleTable.from_text(start)
    w = neutral.neutral_walk(start, a.ics, a.seed, max_steps=a.max_steps)
    doc = {"length": len(w), "reason": w.reason, "start_f": w.start.fitness.value}
    rows = [(t, s.rule.to_hex(), s.fitness.k, s.fitness.n, s.fitness.value, s.distance)
            for t, s in enumerate(w.steps)]
    header = ["step", "rule", "k", "n", "f", "distance"]
    if a.scan:
        sc = neutral.scan_walk(w, a.ics, a.seed, a.max_steps)
        deg = sc.degrees
        rows = [r + (int(d),) for r, d in zip(rows, deg)]
        header.append("degree")
        new, fit = neutral.innovation_trace(sc)
        results.write_csv(out / "innovation.csv", "innovation", ["step", "new", "fitter"],
                          zip(range(len(new)), new.tolist(), fit.tolist()))
        results.emit_plot(out, "innovation", "series", "innovation.csv", ylabel="new fitness values")
        doc.update(degree_mean=float(deg.mean()), degree_sd=float(deg.std()))
        try:
            doc["degree_acf1"] = float(neutral.neutral_degree_acf(deg, 1)[1])
        except DegenerateVariance:
            doc["degree_acf1"] = None
    results.write_csv(out / "walk.csv", "neutral-walk", header, rows)
    results.emit_plot(out, "walk", "series", "walk.csv", x=1, y=5)
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def cmd_horizon(a, out, inputs):
    rule = parse_rule(a.rule)
    h = neutral.evolvability_horizon(rule, a.ics, a.seed, max_steps=a.max_steps)
    results.write_csv(out / "horizon.csv", "horizon", ["position", "f"],
                      zip(range(1, 129), h.sorted_values.tolist()))
    results.emit_plot(out, "horizon", "scatter", "horizon.csv", xlabel="neighbour (sorted)", ylabel="fitness")
    doc = {"rule": rule.to_hex(), **_est(h.fitness), "r": h.r, "m": h.m,
           "better_neighbours": h.better_neighbours()}
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def cmd_per_bit(a, out, inputs):
    cat = rules.BLOK if a.catalog == "blok" else rules.BLOK_PRIME
    pb = neutral.per_bit_evolvability(cat, a.ics, a.seed, a.max_steps)
    results.write_csv(out / "per_bit.csv", "per-bit", ["rank", "bit", "mean", "sd"],
                      zip(range(128), pb.bit.tolist(), pb.mean.tolist(), pb.sd.tolist()))
    results.emit_plot(out, "per_bit", "errorbars", "per_bit.csv")
    doc = {"catalog": a.catalog, "mean_sd": float(pb.sd.mean())}
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def cmd_walk(a, out, inputs):
    tr = timeseries.random_walk(a.space, a.length, a.ics, a.seed, a.max_steps)
    results.write_csv(out / "walk.csv", "walk", ["t", "f"], zip(range(len(tr)), tr.values.tolist()))
    max_lag = a.max_lag or max(1, len(tr) // 4)
    ac = timeseries.acf(tr, max_lag)
    pa = timeseries.pacf(tr, max_lag)
    results.write_csv(out / "acf.csv", "acf", ["lag", "acf", "pacf", "band"],
                      zip(range(max_lag + 1), ac.values.tolist(), pa.values.tolist(), [ac.band] * (max_lag + 1)))
    results.emit_plot(out, "acf", "stem", "acf.csv", col=2, band_col=4)
    results.emit_plot(out, "pacf", "stem", "acf.csv", col=3, band_col=4)
    results.emit_plot(out, "walk", "series", "walk.csv")
    tau, cross = timeseries.correlation_length(tr, max_lag)
    doc = {"space": a.space, "length": len(tr), "r1": float(ac.values[1]) if max_lag >= 1 else None,
           "tau": tau, "band_crossing": cross}
    results.write_json(out / "summary.json", "summary", doc)
    return doc


def _read_trace(path):
    _, header, rows = results.read_csv(path, "walk")
    return np.array([float(r[header.index("f")]) for r in rows])


def cmd_arma(a, out, inputs):
    inputs.append(a.trace)
    y = _read_trace(a.trace)
    doc = {}
    if a.identify:
        idn = timeseries.box_jenkins_identify(y, a.p_max, a.q_max)
        doc["candidates"] = [{"p": c.p, "q": c.q, "aic": c.aic,
                              "significant": c.model.significant().tolist()} for c in idn.candidates]
        doc["pacf_cutoff"] = idn.pacf_cutoff
        doc["acf_cutoff"] = idn.acf_cutoff
        doc["failed"] = [list(f) for f in idn.failed]
    m = timeseries.fit_arma(y, a.p, a.q)
    table = timeseries.ljung_box_table(m.residuals, a.h, m)
    results.write_csv(out / "ljung_box.csv", "ljung-box", ["h", "Q", "p"], table)
    doc["model"] = m.to_dict()
    doc["ljung_box"] = [{"h": h, "Q": q, "p": pv} for h, q, pv in table]
    results.write_json(out / "arma.json", "arma", doc)
    return {"p": m.p, "q": m.q, "aic": m.aic, "r2": m.r2}


def _free_bits(text: str) -> np.ndarray:
    t = "".join(text.split()).lower()
    n = rules.OLYMPUS.dimension
    if len(t) == n and set(t) <= {"0", "1"}:
        return np.frombuffer(t.encode(), np.uint8) - ord("0")
    if t.startswith("0x"):
        t = t[2:]
    if len(t) == (n + 3) // 4:
        v = int(t, 16)
        if v >> n:
            raise ValueError(f"hex value exceeds {n} bits")
        return np.array([int(c) for c in format(v, f"0{n}b")], np.uint8)
    raise ValueError(f"free bits must be {n} binary digits or {(n + 3) // 4} hex digits")


def _bits_hex(bits) -> str:
    n = len(bits)
    return format(int("".join(map(str, bits)), 2), f"0{(n + 3) // 4}x")


def cmd_olympus(a, out, inputs):
    if a.action == "embed":
        r = rules.embed(_free_bits(a.bits))
        doc = {"rule": r.to_hex(), "text": r.to_text()}
    elif a.action == "project":
        bits = rules.project(parse_rule(a.rule))
        doc = {"free_bits": "".join(map(str, bits)), "hex": _bits_hex(bits)}
    else:
        blok = rules.BLOK
        catalog, best, maxim = rules.select_blok_prime()
        doc = {"S": rules.SCHEMA_S.to_text(0), "S_fixed": rules.SCHEMA_S.fixed_count,
               "S_prime": rules.OLYMPUS.to_text(0), "S_prime_fixed": rules.OLYMPUS.fixed_count,
               "joint_bits_blok": rules.joint_bits(blok.rules), "joint_bits_blok_prime": best,
               "maximisers": len(maxim)}
        for name, cat in (("blok", blok), ("blok_prime", rules.BLOK_PRIME)):
            D = rules.distance_matrix(cat.rules)
            results.write_csv(out / f"distances_{name}.csv", "distances", ["rule", *cat.names],
                              [(n, *map(int, row)) for n, row in zip(cat.names, D)])
    results.write_json(out / "olympus.json", "olympus", doc)
    return doc


def cmd_ga(a, out, inputs):
    if a.action == "report":
        logs = []
        for p in a.logs:
            inputs.append(p)
            logs.append(evolver.RunLog.from_jsonl(Path(p).read_text(encoding="utf-8")))
        th = tuple(float(x) for x in a.thresholds.split(","))
        rows = evolver.summarize_runs(logs, th)
        header = list(rows[0])
        results.write_csv(out / "ga_report.csv", "ga-report", header, [[r[h] for h in header] for r in rows])
        return {"variants": [r["variant"] for r in rows]}
    kw = {}
    if a.pop_size:
        kw["pop_size"] = a.pop_size
    cfg = evolver.GaConfig.preset(a.preset, a.variant, a.seed, **kw)
    if a.generations:
        cfg = evolver.GaConfig(**{**cfg.to_dict(), "generations": a.generations})
    log = evolver.run(cfg)
    text = log.to_jsonl()
    (out / "run.jsonl").write_text(text, encoding="utf-8")
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
    b = log.best
    return {"variant": cfg.variant.value, "best_fitness": b.best_fitness, "best_rule": b.best_rule,
            "generation": b.generation}


COMMANDS = {"eval": cmd_eval, "dos": cmd_dos, "mh-sample": cmd_mh, "fdc": cmd_fdc, "cloud": cmd_cloud,
            "neutral-walk": cmd_neutral_walk, "horizon": cmd_horizon, "per-bit": cmd_per_bit,
            "walk": cmd_walk, "arma": cmd_arma, "olympus": cmd_olympus, "ga": cmd_ga}


def _params(a) -> dict:
    return {k: v for k, v in sorted(vars(a).items()) if k not in ("out_root", "run_dir", "threads")}


def _run_dir(a) -> Path:
    if a.run_dir:
        return Path(a.run_dir)
    p = _params(a)
    h = hashlib.sha256(json.dumps(p, sort_keys=True, default=str).encode()).hexdigest()[:10]
    name = "-".join(x for x in (a.cmd, getattr(a, "action", None)) if x)
    seed = p.get("seed")
    return results.output_root(a.out_root) / (f"{name}-s{seed}-{h}" if seed is not None else f"{name}-{h}")


def cmd_report(a) -> int:
    d = Path(a.dir)
    man = results.read_json(d / "manifest.json", "manifest")
    for name, digest in man["outputs"].items():
        p = d / name
        if p.suffix == ".csv":
            results.read_csv(p)
        elif p.suffix == ".json":
            results.read_json(p)
        if results.sha256_file(p) != digest:
            print(f"{name}: checksum mismatch", file=sys.stderr)
            return EXIT_DATA
    print(json.dumps({"subcommand": man["subcommand"], "seed": man["seed"],
                      "outputs": sorted(man["outputs"])}, indent=2))
    if not a.verify:
        return EXIT_OK
    with tempfile.TemporaryDirectory() as tmp:
        argv = [x for x in man["argv"]]
        argv = _strip_dirs(argv) + []
        code = main(["--run-dir", tmp, *argv])
        if code != EXIT_OK:
            return code
        for name, digest in man["outputs"].items():
            q = Path(tmp) / name
            if not q.is_file() or results.sha256_file(q) != digest:
                print(f"{name}: re-run differs", file=sys.stderr)
                return EXIT_DATA
    print("verified: re-run reproduces every payload")
    return EXIT_OK


def _strip_dirs(argv):
    out, skip = [], False
    for x in argv:
        if skip:
            skip = False
            continue
        if x in ("--out-root", "--run-dir"):
            skip = True
            continue
        if x.startswith(("--out-root=", "--run-dir=")):
            continue
        out.append(x)
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        a = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    ca.set_threads(a.threads)
    try:
        if a.cmd == "report":
            return cmd_report(a)
        out = _run_dir(a)
        if out.exists() and any(out.iterdir()):
            shutil.rmtree(out)
        out.mkdir(parents=True, exist_ok=True)
        started = results.now()
        inputs: list[str] = []
        doc = COMMANDS[a.cmd](a, out, inputs)
        results.write_manifest(out, _strip_dirs(argv), a.cmd, _params(a), getattr(a, "seed", None),
                               __version__, inputs, started)
        print(json.dumps(doc, indent=2, sort_keys=True, default=_json_default))
        print(f"results in {out}", file=sys.stderr)
        return EXIT_OK
    except UsageError as exc:
        print(f"olympus-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateVariance, NonConvergence, FloatingPointError) as exc:
        print(f"olympus-lab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError, InsufficientData, DomainError) as exc:
        print(f"olympus-lab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(type(x).__name__)


if __name__ == "__main__":
    sys.exit(main())
