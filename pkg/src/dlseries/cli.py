"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 resource cap hit,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import __version__
from .errors import CapExceeded, DLSeriesError, InvariantViolation
from .rootdatum import (
    BUILTIN_HELP,
    FrobeniusTwist,
    RootDatum,
    builtin_datum,
    format_seq,
    is_prime,
    make_twist,
    named_twist,
    parse_seq,
    parse_spec_text,
    weyl_group,
)
from .torus import character_from_dual, finite_torus, fmt_qz, TorusCharacter
from .series import (
    context,
    minimal_pairs,
    series_partition,
)
from .strata import monodromy_table

CSV_VERSION = 1


@dataclass
class JobConfig:
    datum: str
    n: int | None
    p: int
    a: int
    twist: str
    mode: str
    ell: int | None
    fmt: str
    cache_dir: str | None
    command: str
    args: dict = field(default_factory=dict)
    spec_text: str | None = None


class ConfigError(Exception):
    pass


# ------------------------------------------------------------------ parsing


def parse_fraction(tok: str) -> Fraction:
    try:
        return Fraction(tok.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot read {tok!r} as a fraction") from None


def parse_qz_vector(text: str) -> tuple[Fraction, ...]:
    text = text.strip().strip("()")
    if not text:
        return ()
    return tuple(parse_fraction(t) for t in text.split(","))


def parse_int_vectors(text: str) -> list[tuple[int, ...]]:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip().strip("()")
        if chunk:
            try:
                out.append(tuple(int(t) for t in chunk.split(",")))
            except ValueError:
                raise ConfigError(f"cannot read cocharacter {chunk!r}") from None
    return out


def fmt_vec(v: Sequence[Fraction]) -> str:
    return "(" + ",".join(fmt_qz(x) for x in v) + ")"


def fmt_group(factors: Sequence[int]) -> str:
    return " x ".join(f"Z/{d}" for d in factors) if factors else "trivial"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("datum and field")
    g.add_argument("--datum", required=True, help=f"builtin name ({BUILTIN_HELP}) or a spec file path")
    g.add_argument("--n", type=int, default=None, help="size parameter for GL, SL, PGL")
    g.add_argument("--p", type=int, default=None, help="characteristic (prime); defaults to the spec file value")
    g.add_argument("--a", type=int, default=None, help="q = p^a (default 1)")
    g.add_argument("--twist", default="split", help="split or graph (ignored when a spec file sets tau)")
    g.add_argument("--mode", choices=("K", "brauer"), default="K")
    g.add_argument("--ell", type=int, default=None, help="the prime l for Brauer mode")
    g.add_argument("--format", dest="fmt", choices=("table", "csv"), default="table")
    g.add_argument("--cache-dir", default=None, help="directory for cached outputs")

    parser = argparse.ArgumentParser(prog="dlseries", description="Torus character combinatorics of finite reductive groups.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("torus", parents=[common], help="the finite torus T^{wF}")
    t.add_argument("w", help="sequence over S-bar, e.g. s1 or 1,s2 or s1s2")
    t.add_argument("--cochar", default="", help="cocharacters to push through N_w, e.g. '1,0;0,1'")

    s = sub.add_parser("series", parents=[common], help="census of rational series")
    s.add_argument("--trivial-only", action="store_true", help="restrict to trivial characters")

    m = sub.add_parser("monodromy", parents=[common], help="monodromy multiplicities on strata")
    m.add_argument("w", nargs="?", default=None, help="sequence over S-bar")
    sel = m.add_mutually_exclusive_group()
    sel.add_argument("--theta", default=None, help="values on the invariant-factor generators, e.g. 1/4")
    sel.add_argument("--series", type=int, default=None, help="use the representative of this census row")

    j = sub.add_parser("jordan", parents=[common], help="Jordan datum of a dual semisimple element")
    j.add_argument("--s", default=None, help="dual element in X (x) Q/Z, e.g. 0,1/2 (default 0)")
    return parser


def load_datum(cfg: JobConfig) -> tuple[RootDatum, FrobeniusTwist]:
    if os.path.isfile(cfg.datum):
        with open(cfg.datum, encoding="utf-8") as fh:
            cfg.spec_text = fh.read()
        rd, tw = parse_spec_text(cfg.spec_text)
        if tw is None or cfg.p is not None or cfg.a is not None:
            p = cfg.p if cfg.p is not None else (tw.p if tw else None)
            if p is None:
                raise ConfigError("the spec file has no p; pass --p")
            a = cfg.a if cfg.a is not None else (tw.a if tw else 1)
            tw = make_twist(rd, p, a, tw.tau if tw else None)
        return rd, tw
    rd = builtin_datum(cfg.datum, cfg.n)
    if cfg.p is None:
        raise ConfigError("--p is required for builtin data")
    return rd, named_twist(rd, cfg.p, cfg.a or 1, cfg.twist)


def validate(cfg: JobConfig, tw: FrobeniusTwist) -> None:
    if cfg.mode == "brauer":
        if cfg.ell is None or not is_prime(cfg.ell):
            raise ConfigError("Brauer mode needs a prime --ell")
        if cfg.ell == tw.p:
            raise ConfigError("--ell must differ from p")


# ------------------------------------------------------------------ commands


def _csv(rows: list[list[str]], kind: str) -> str:
    buf = io.StringIO()
    buf.write(f"# dlseries {kind} csv v{CSV_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _header(rd: RootDatum, tw: FrobeniusTwist, cfg: JobConfig) -> str:
    mode = "K" if cfg.mode == "K" else f"brauer, l={cfg.ell}"
    return f"datum {rd}, q = {tw.q}, twist {cfg.twist if not cfg.spec_text else 'from spec'}, mode {mode}"


def cmd_torus(rd: RootDatum, tw: FrobeniusTwist, cfg: JobConfig) -> str:
    w = parse_seq(cfg.args["w"], rd.semisimple_rank)
    T = finite_torus(rd, tw, w)
    cochars = parse_int_vectors(cfg.args.get("cochar") or "")
    for c in cochars:
        if len(c) != rd.rank:
            raise ConfigError(f"cocharacter {c} must have {rd.rank} coordinates")
    f = T.group.invariant_factors
    if cfg.fmt == "csv":
        rows = [["w", "invariant_factors", "order", "cocharacter", "norm"]]
        base = [format_seq(w), ";".join(map(str, f)), str(T.order)]
        if not cochars:
            rows.append(base + ["", ""])
        for c in cochars:
            rows.append(base + [";".join(map(str, c)), ";".join(map(str, T.norm(c)))])
        return _csv(rows, "torus")
    lines = [_header(rd, tw, cfg), f"w = {format_seq(w)}", f"T^wF = {fmt_group(f)}, order {T.order}"]
    for c in cochars:
        lines.append(f"N_w({','.join(map(str, c))}) = ({','.join(map(str, T.norm(c)))})")
    return "\n".join(lines) + "\n"


SERIES_COLUMNS = ["index", "rep_w", "rep_theta", "size", "geometric_id", "minimal_pairs", "dual_s"]


def census_rows(rd: RootDatum, tw: FrobeniusTwist, cfg: JobConfig) -> list[list[str]]:
    part = series_partition(rd, tw, cfg.mode, cfg.ell, trivial_only=cfg.args.get("trivial_only", False))
    geo: dict = {}
    rows = []
    for k, sid in enumerate(part, start=1):
        gid = geo.setdefault(sid.geometric_key, len(geo) + 1)
        rep = sid.representative
        rows.append([str(k), str(rep.w), fmt_vec(rep.theta.values), str(sid.size), str(gid),
                     str(len(minimal_pairs(rd, tw, sid))), fmt_vec(sid.dual)])
    return rows


def read_csv(text: str, kind: str) -> list[dict[str, str]]:
    """Parse a CSV emitted by this tool, checking the versioned header line."""
    lines = text.splitlines()
    want = f"# dlseries {kind} csv v{CSV_VERSION}"
    if not lines or lines[0] != want:
        raise ConfigError(f"expected header {want!r}")
    return list(csv.DictReader(lines[1:]))


def census_from_csv(rd: RootDatum, tw: FrobeniusTwist, text: str):
    """Rebuild the representative pairs of a census CSV."""
    from .series import make_pair

    W = weyl_group(rd)
    out = []
    for row in read_csv(text, "series"):
        seq = parse_seq(row["rep_w"], rd.semisimple_rank)
        word = tuple(i for i in seq if i)
        out.append(make_pair(rd, tw, W.from_word(word), parse_qz_vector(row["rep_theta"])))
    return out


def cmd_series(rd: RootDatum, tw: FrobeniusTwist, cfg: JobConfig) -> str:
    rows = census_rows(rd, tw, cfg)
    if cfg.fmt == "csv":
        return _csv([SERIES_COLUMNS] + rows, "series")
    widths = [max(len(r[i]) for r in rows + [SERIES_COLUMNS]) for i in range(len(SERIES_COLUMNS))]
    out = [_header(rd, tw, cfg), f"{len(rows)} rational series, {len({r[4] for r in rows})} geometric classes"]
    out.append("  ".join(c.ljust(w) for c, w in zip(SERIES_COLUMNS, widths)))
    out.extend("  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows)
    return "\n".join(x.rstrip() for x in out) + "\n"


def _select_theta(rd: RootDatum, tw: FrobeniusTwist, cfg: JobConfig):
    w_text = cfg.args.get("w")
    if cfg.args.get("series") is not None:
        part = series_partition(rd, tw, cfg.mode, cfg.ell)
        k = cfg.args["series"]
        if not 1 <= k <= len(part):
            raise ConfigError(f"--series must be between 1 and {len(part)}")
        rep = part[k - 1].representative
        if w_text is None:
            return rep.w.word or (0,), rep.theta if rep.w.word else None, part[k - 1].dual
        w = parse_seq(w_text, rd.semisimple_rank)
        return w, None, part[k - 1].dual
    if w_text is None:
        raise ConfigError("give a sequence w or --series")
    w = parse_seq(w_text, rd.semisimple_rank)
    T = finite_torus(rd, tw, w)
    vals = parse_qz_vector(cfg.args["theta"]) if cfg.args.get("theta") else tuple(Fraction(0) for _ in T.group.invariant_factors)
    try:
        th = TorusCharacter(tuple(v - (v.numerator // v.denominator) for v in vals), T.group.invariant_factors)
    except DLSeriesError as exc:
        raise ConfigError(f"--theta does not define a character of {fmt_group(T.group.invariant_factors)}: {exc}") from None
    return w, th, None


def cmd_monodromy(rd: RootDatum, tw: FrobeniusTwist, cfg: JobConfig) -> str:
    w, th, s = _select_theta(rd, tw, cfg)
    T = finite_torus(rd, tw, w)
    if th is None:
        th = character_from_dual(T, s)
    table = monodromy_table(rd, tw, w, th)
    lw = len(table.rows[0][1])
    head = ["v"] + [f"i={i}" for i in range(lw)]
    rows = [[format_seq(v)] + [str(x) for x in r] for v, r in table.rows]
    if cfg.fmt == "csv":
        return _csv([head] + rows, "monodromy")
    widths = [max(len(r[i]) for r in rows + [head]) for i in range(len(head))]
    out = [_header(rd, tw, cfg), f"w = {format_seq(w)}, theta = {th} on {fmt_group(T.group.invariant_factors)}"]
    out.append("  ".join(c.rjust(wd) for c, wd in zip(head, widths)))
    out.extend("  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in rows)
    return "\n".join(out) + "\n"


def cmd_jordan(rd: RootDatum, tw: FrobeniusTwist, cfg: JobConfig) -> str:
    from .jordan import JordanDatum, is_quasi_isolated, jordan_datum, pi_set
    from .rootdatum import dual_datum

    s = parse_qz_vector(cfg.args["s"]) if cfg.args.get("s") else tuple(Fraction(0) for _ in range(rd.rank))
    if len(s) != rd.rank:
        raise ConfigError(f"--s must have {rd.rank} coordinates")
    s = tuple(x - (x.numerator // x.denominator) for x in s)
    if any(x.denominator % tw.p == 0 for x in s):
        raise ConfigError("s must have order prime to p")
    jd = jordan_datum(rd, tw, s)
    qi = is_quasi_isolated(dual_datum(rd), s)
    pis = sorted(pi_set(rd, tw))
    pi_txt = "{" + ", ".join(map(str, pis)) + "}"
    if isinstance(jd, JordanDatum):
        I, v = jd.I, jd.v
        full = len(I) == rd.semisimple_rank and v.length == 0
        if full:
            levi = "L(s)=G"
        elif not I:
            levi = f"Levi: torus (∅,{v})"
        else:
            levi = f"Levi: ({{{','.join(map(str, I))}}},{v})"
        obstruction = ""
    else:
        I, v, levi, obstruction = None, None, f"NotLevi: {jd.reason}", jd.reason
    if cfg.fmt == "csv":
        rows = [["s", "levi_I", "levi_v", "quasi_isolated", "obstruction", "pi"],
                [fmt_vec(s), "" if I is None else ";".join(map(str, I)), "" if v is None else str(v),
                 str(qi).lower(), obstruction, ";".join(map(str, pis))]]
        return _csv(rows, "jordan")
    qi_txt = "quasi-isolated" if qi else "not quasi-isolated"
    return f"{_header(rd, tw, cfg)}\ns = {fmt_vec(s)}\n{levi}; {qi_txt}; π = {pi_txt}\n"


COMMANDS = {"torus": cmd_torus, "series": cmd_series, "monodromy": cmd_monodromy, "jordan": cmd_jordan}


# ------------------------------------------------------------------ cache


def cache_key(cfg: JobConfig) -> str:
    payload = {
        "version": __version__,
        "datum": cfg.spec_text if cfg.spec_text is not None else [cfg.datum, cfg.n],
        "q": [cfg.p, cfg.a],
        "twist": cfg.twist,
        "mode": [cfg.mode, cfg.ell],
        "command": cfg.command,
        "args": cfg.args,
        "format": cfg.fmt,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()


def cache_read(cfg: JobConfig) -> str | None:
    if not cfg.cache_dir:
        return None
    path = os.path.join(cfg.cache_dir, cache_key(cfg) + ".out")
    if os.path.isfile(path):
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    return None


def cache_write(cfg: JobConfig, text: str) -> None:
    if not cfg.cache_dir:
        return
    os.makedirs(cfg.cache_dir, exist_ok=True)
    path = os.path.join(cfg.cache_dir, cache_key(cfg) + ".out")
    fd, tmp = tempfile.mkstemp(dir=cfg.cache_dir, prefix=".tmp-", suffix=".out")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ------------------------------------------------------------------ main


def run(argv: Sequence[str] | None = None) -> tuple[int, str, str]:
    """Run the CLI and return (exit code, stdout text, stderr text)."""
    parser = build_parser()
    err = io.StringIO()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    extra = {k: v for k, v in vars(ns).items()
             if k not in ("datum", "n", "p", "a", "twist", "mode", "ell", "fmt", "cache_dir", "command")}
    cfg = JobConfig(ns.datum, ns.n, ns.p, ns.a, ns.twist, ns.mode, ns.ell, ns.fmt, ns.cache_dir, ns.command, extra)
    try:
        rd, tw = load_datum(cfg)
        cfg.p, cfg.a = tw.p, tw.a
        validate(cfg, tw)
        cached = cache_read(cfg)
        if cached is not None:
            return 0, cached, ""
        out = COMMANDS[cfg.command](rd, tw, cfg)
        cache_write(cfg, out)
        return 0, out, ""
    except CapExceeded as exc:
        return 3, "", f"dlseries: resource cap exceeded: {exc}\n"
    except InvariantViolation as exc:
        return 4, "", f"dlseries: internal invariant violated (please report): {exc}\n"
    except (ConfigError, DLSeriesError, ValueError, OSError) as exc:
        return 2, "", f"dlseries: {type(exc).__name__}: {exc}\n"


def main(argv: Sequence[str] | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
