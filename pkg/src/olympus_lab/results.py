"""Result files: versioned CSV/JSON payloads, run manifests and gnuplot scripts.

Every CSV starts with a ``# format: olympus-lab/<kind>/<version>`` line
(gnuplot skips it as a comment) and every JSON object carries a ``format``
key.  Readers refuse formats they do not know.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import os
from pathlib import Path

PREFIX = "olympus-lab/"
MANIFEST_FORMAT = PREFIX + "manifest/1"
# kind -> supported version
KNOWN = {
    "manifest": 1, "eval": 1, "points": 1, "dos": 1, "summary": 1, "fdc": 1,
    "cloud": 1, "nsc": 1, "walk": 1, "acf": 1, "arma": 1, "ljung-box": 1,
    "neutral-walk": 1, "innovation": 1, "horizon": 1, "per-bit": 1,
    "ga-log": 1, "ga-report": 1, "olympus": 1, "distances": 1,
}


class FormatError(ValueError):
    pass


def tag(kind: str) -> str:
    return f"{PREFIX}{kind}/{KNOWN[kind]}"


def check_tag(value: str, kind: str | None = None) -> str:
    """Validate a format tag and return its kind."""
    if not isinstance(value, str) or not value.startswith(PREFIX):
        raise FormatError(f"not an olympus-lab format tag: {value!r}")
    try:
        k, ver = value[len(PREFIX):].rsplit("/", 1)
        ver = int(ver)
    except ValueError:
        raise FormatError(f"malformed format tag {value!r}") from None
    if k not in KNOWN or KNOWN[k] != ver:
        raise FormatError(f"unsupported format {value!r}")
    if kind is not None and k != kind:
        raise FormatError(f"expected a {kind!r} file, got {value!r}")
    return k


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path: Path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_csv(path, kind: str, header, rows):
    buf = io.StringIO()
    buf.write(f"# format: {tag(kind)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    _write_text(Path(path), buf.getvalue())


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def read_csv(path, kind: str | None = None):
    """Return ``(kind, header, rows)`` with rows as lists of strings."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if not first.startswith("# format: "):
            raise FormatError(f"{path}: missing format line")
        k = check_tag(first[len("# format: "):], kind)
        r = csv.reader(fh)
        header = next(r)
        return k, header, [row for row in r if row]


def write_json(path, kind: str, payload: dict):
    doc = {"format": tag(kind), **payload}
    _write_text(Path(path), json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc


def read_json(path, kind: str | None = None) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    check_tag(doc.get("format"), kind)
    return doc


# -- manifests ----------------------------------------------------------------

def now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def write_manifest(outdir: Path, argv: list[str], subcommand: str, params: dict,
                   seed, version: str, inputs: list[str], started: str):
    outdir = Path(outdir)
    outputs = {p.name: sha256_file(p) for p in sorted(outdir.iterdir())
               if p.is_file() and p.name != "manifest.json"}
    doc = {
        "subcommand": subcommand,
        "argv": argv,
        "params": params,
        "seed": seed,
        "version": version,
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": outputs,
        "started": started,
        "finished": now(),
    }
    return write_json(outdir / "manifest.json", "manifest", doc)


def output_root(explicit: str | None) -> Path:
    return Path(explicit or os.environ.get("OLYMPUS_LAB_OUT") or "olympus-lab-out")


# -- gnuplot ------------------------------------------------------------------

_HEAD = "set datafile separator ','\nset terminal pngcairo size 800,600\nset key autotitle columnhead\n"


def gnuplot(style: str, csv_name: str, out_png: str, **kw) -> str:
    """Gnuplot script for a figure style; it reads ``csv_name`` only."""
    s = _HEAD + f"set output '{out_png}'\n"
    if style == "histogram":
        s += ("set xlabel 'fitness'\nset ylabel 'count'\nset style fill solid 0.6\n"
              f"plot '{csv_name}' using (($1+$2)/2):3:($2-$1) with boxes notitle\n")
    elif style == "stem":
        s += ("set xlabel 'lag'\nset ylabel 'correlation'\n"
              f"plot '{csv_name}' using 1:{kw.get('col', 2)} with impulses lw 2 notitle, \\\n"
              f"     '' using 1:{kw.get('band_col', 4)} with lines dt 2 lc 'black' title '+2/sqrt(L)', \\\n"
              f"     '' using 1:(-${kw.get('band_col', 4)}) with lines dt 2 lc 'black' notitle\n")
    elif style == "cloud":
        seg = kw.get("segments")
        s += "set xlabel 'fitness'\nset ylabel 'offspring fitness'\n"
        s += f"plot '{csv_name}' using 1:2 with points pt 7 ps 0.3 notitle"
        if seg:
            s += f", \\\n     '{seg}' using 1:2 with linespoints lw 2 title 'bin means'"
        s += "\n"
    elif style == "scatter":
        s += (f"set xlabel '{kw.get('xlabel', 'x')}'\nset ylabel '{kw.get('ylabel', 'y')}'\n"
              f"plot '{csv_name}' using {kw.get('x', 1)}:{kw.get('y', 2)} with points pt 7 ps 0.4 notitle\n")
    elif style == "series":
        s += (f"set xlabel '{kw.get('xlabel', 'step')}'\nset ylabel '{kw.get('ylabel', 'fitness')}'\n"
              f"plot '{csv_name}' using {kw.get('x', 1)}:{kw.get('y', 2)} with lines notitle\n")
    elif style == "errorbars":
        s += ("set xlabel 'bits (sorted)'\nset ylabel 'fitness change'\n"
              f"plot '{csv_name}' using 1:3:4 with yerrorbars pt 7 ps 0.4 notitle\n")
    else:
        raise ValueError(f"unknown figure style {style!r}")
    return s


def emit_plot(outdir, name: str, style: str, csv_name: str, **kw) -> Path:
    path = Path(outdir) / f"{name}.gp"
    _write_text(path, gnuplot(style, csv_name, f"{name}.png", **kw))
    return path
