"""Batch front end: configuration, pipeline, fixtures and report emission.

Slopes are written as exact fraction strings everywhere; there is no float
in the data path.  The svg-grid output is the only place matplotlib is used.
"""

import json
import logging
import os
import re
import time
import dataclasses
from dataclasses import dataclass
from fractions import Fraction

import click
import yaml

from .errors import ConfigInvalid, HmfError, IoFailure
from .presets import PRESETS, Setting
from .slope_engine import (SMSet, charpoly, hodge_bound, newton_slopes, precision_for_slope, row_floor, trust_count,
                           verify_np_above_hodge)

log = logging.getLogger("hmfslopes")

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "data", "fixtures")
FORMATS = ("json-lines", "tsv", "svg-grid")
GRID_PRODUCTS = ((1, 0), (0, 1), (1, 1), (1, 2), (2, 1))
GRID_EXTRA = ((1, 3), (3, 1), (2, 3), (3, 2))


# -- slope text ----------------------------------------------------------------------

def frac_str(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def parse_smset(text):
    """'0:1 1/2:2' -> SMSet."""
    pairs = []
    for tok in text.split():
        s, _, m = tok.partition(":")
        pairs.append((Fraction(s), int(m)))
    return SMSet(pairs)


def format_smset(sm):
    return " ".join("%s:%d" % (frac_str(s), m) for s, m in sm)


def paper_style(sm):
    return ", ".join("(%s, %d)" % (frac_str(s), m) for s, m in sm)


# -- weights -------------------------------------------------------------------------

_WEIGHT_RE = re.compile(r"^\[?\s*([0-9 ,]+?)\s*\]?\s*(psi[0-9]*(?::[0-9]+)?|triv)?\s*(?:tau\^?\(?([-0-9,]+)\)?)?$")


def parse_weight(text):
    """'[2,2]psi2tau^2' -> (k, character tag, tau power)."""
    m = _WEIGHT_RE.match(text.replace(" ", ""))
    if not m:
        raise ConfigInvalid("cannot parse weight %r" % text)
    k = tuple(int(x) for x in m.group(1).split(",") if x)
    char = m.group(2) or "psi"
    tau = m.group(3)
    if tau is None:
        tau = 0
    elif "," in tau:
        tau = tuple(int(x) for x in tau.split(","))
    else:
        tau = int(tau)
    return k, char, tau


def make_weight(setting, text, char=None, tau=None):
    k, tag, t = parse_weight(text)
    if char:
        tag = char
    if tau is not None:
        t = tau
    index = 0
    primitive = tag != "triv"
    if ":" in tag:
        tag, idx = tag.split(":")
        index = int(idx)
    try:
        kappa = setting.weight(k, t, char_index=index, primitive=primitive, name=None if primitive else "")
    except IndexError as exc:
        raise ConfigInvalid("no admissible character %r for weight %r" % (tag, text)) from exc
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc
    return kappa


# -- settings -------------------------------------------------------------------------

def parse_level_text(text, p):
    """'9' or '8*p11.2' -> (s, extra)."""
    s, extra = None, []
    for tok in re.split(r"[*,]", str(text)):
        tok = tok.strip()
        if not tok:
            continue
        if tok.isdigit():
            n, e = int(tok), 0
            while n % p == 0:
                n //= p
                e += 1
            if n != 1:
                raise ConfigInvalid("level %s: the integer part must be a power of p" % text)
            s = e
        else:
            name, _, e = tok.partition("^")
            extra.append((name, int(e) if e else 1))
    if not s:
        raise ConfigInvalid("level %s must contain a power of p" % text)
    return s, tuple(extra)


def resolve_setting(field=None, prime=None, level=None, preset=None, cache_dir=None):
    if preset:
        if preset not in PRESETS:
            raise ConfigInvalid("unknown preset %r (known: %s)" % (preset, ", ".join(sorted(PRESETS))))
        return Setting.preset(preset, cache_dir=cache_dir)
    if field is None or prime is None:
        raise ConfigInvalid("give --preset or both --field and --prime")
    d, p = int(field), int(prime)
    for name, cfg in PRESETS.items():
        if cfg["d"] == d and cfg["p"] == p and level is None:
            return Setting.preset(name, cache_dir=cache_dir)
    if level is None:
        raise ConfigInvalid("--level is required for d=%d, p=%d" % (d, p))
    s, extra = parse_level_text(level, p)
    m = None
    for cfg in PRESETS.values():
        if cfg["d"] == d and cfg["p"] == p and cfg["s"] == s:
            m = cfg["m"]
    try:
        return Setting(d, p, s, extra, m=m, cache_dir=cache_dir)
    except HmfError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigInvalid("bad setting: %s" % exc) from exc


def operator_tag(setting, op):
    """'U_p', 'U_q1', 'U_q2' or a literal prime tag like 'U_p3.1'."""
    if op in ("U_p", "Up"):
        return "U_p"
    m = re.match(r"^U_q([0-9])$", op)
    if m:
        idx = int(m.group(1)) - 1
        primes = setting.primes
        if idx >= len(primes) or len(primes) < 2:
            raise ConfigInvalid("operator %s needs a split prime" % op)
        return "U_" + primes[idx].name()
    return op


# -- fixtures ---------------------------------------------------------------------------

@dataclass
class Fixture:
    meta: dict
    rows: list


def read_fixture(path):
    if not os.path.exists(path) and os.path.exists(os.path.join(FIXTURE_DIR, path)):
        path = os.path.join(FIXTURE_DIR, path)
    meta, rows = {}, []
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure("cannot read fixture %s" % path) from exc
    columns = ["operator", "weight", "size", "slopes"]
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@"):
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
            if key.strip() == "columns":
                columns = val.split()
            continue
        cells = [c.strip() for c in line.split("|")]
        row = dict(zip(columns, cells))
        row["slopes"] = parse_smset(row["slopes"])
        rows.append(row)
    return Fixture(meta, rows)


def fixture_row(fixture, operator, weight, size):
    for row in fixture.rows:
        if row["operator"] == operator and row["weight"] == weight and str(row["size"]) == str(size):
            return row["slopes"]
    return None


def read_grids(path=os.path.join(FIXTURE_DIR, "grids.txt")):
    """{(setting, weight): (cols, rows, matrix rows top to bottom)}."""
    out = {}
    cur = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line[0] in "#@":
                continue
            parts = line.split()
            if parts[0] == "grid":
                cur = {"key": (parts[1], parts[2]), "rows_data": []}
            elif parts[0] == "cols":
                cur["cols"] = [Fraction(x) for x in parts[1:]]
            elif parts[0] == "rows":
                cur["rows"] = [Fraction(x) for x in parts[1:]]
            elif parts[0] == "end":
                out[cur["key"]] = (cur["cols"], cur["rows"], cur["rows_data"])
                cur = None
            else:
                cur["rows_data"].append([int(x) for x in parts])
    return out


def compare_within(computed, expected, bound=None, horizon=None):
    """Equal as multisets on slopes <= min(bound, horizon)."""
    cut = None
    for b in (bound, horizon):
        if b is not None:
            cut = Fraction(b) if cut is None else min(cut, Fraction(b))

    def keep(sm):
        return [(Fraction(s), m) for s, m in sm if cut is None or Fraction(s) <= cut]

    return keep(computed) == keep(expected)


# -- reports ----------------------------------------------------------------------------

@dataclass
class SlopeRecord:
    weight: str
    operator: str
    R: object
    size: int
    slopes: SMSet
    certified_upto: object
    tail: list
    np_vertices: list
    hodge_vertices: list
    precision: int
    seconds: float
    trust: int = None
    verdict: str = None


@dataclass
class GridRecord:
    setting: str
    weight: str
    grid: object
    constraints: dict
    verdict: str = None


@dataclass
class SlopeReport:
    records: list = dataclasses.field(default_factory=list)
    grids: list = dataclasses.field(default_factory=list)


def _np_record(kappa, op, R, A, np_poly, h, g, seconds):
    sm = np_poly.slopes()
    horizon = sm.horizon
    hodge = hodge_bound(h, g, 1 + (int(horizon) if horizon is not None else 0) + 1)
    return SlopeRecord(
        weight=kappa.display(), operator=op, R=R, size=A.size, slopes=sm,
        certified_upto=horizon, tail=np_poly.uncertified_tail,
        np_vertices=[(x, y) for x, y in np_poly.vertices if x <= np_poly.certified_upto],
        hodge_vertices=hodge, precision=A.ctx.N, seconds=seconds,
        trust=trust_count(A.size, h) if R != "classical" else None,
    )


def compute_classical(setting, kappa, op):
    t0 = time.time()
    sm, A = setting.classical_slopes(kappa, op)
    np_poly = newton_slopes(charpoly(A), row_floor(A))
    return _np_record(kappa, op, "classical", A, np_poly, setting.h, kappa.tuple.g, time.time() - t0)


def compute_overconvergent(setting, kappa, op, R, slope_bound=None, precision=None):
    """Slopes of the R-monomial truncation; precision grows until slope_bound is certified."""
    t0 = time.time()
    h, g = setting.h, kappa.tuple.g
    e = kappa.coefficient_context(10).e
    if precision is None:
        M = precision_for_slope(h, g, slope_bound if slope_bound is not None else 3, e)
    else:
        M = int(precision)
    while True:
        A = setting.matrix(kappa, op, R=R, M=M)
        np_poly = newton_slopes(charpoly(A), row_floor(A))
        sm = np_poly.slopes()
        done = precision is not None or slope_bound is None
        if not done:
            reached = sm.horizon is not None and sm.horizon >= Fraction(slope_bound)
            whole = np_poly.certified_upto == np_poly.degree
            done = reached or whole
        if done:
            break
        log.info("precision %d does not certify slopes up to %s; raising", M, slope_bound)
        M = int(M * 1.5)
    return _np_record(kappa, op, R, A, np_poly, h, g, time.time() - t0)


def compute_grid(setting, kappa, products=GRID_PRODUCTS, extra=GRID_EXTRA, symmetry=True):
    """Solve the partial-slope grid, adding higher products while it is ambiguous."""
    from .structure_lab import al_centre, partial_grid_solve
    q1, q2 = [q.name() for q in setting.primes]
    sym = None
    if symmetry:
        k = kappa.tuple.k
        sym = (al_centre(k, (1, 0)), al_centre(k, (0, 1)))
    constraints = {}
    queue = list(products) + list(extra)
    grid = None
    for n, (a, b) in enumerate(queue):
        tag = "*".join(["U_" + q1] * a + ["U_" + q2] * b)
        constraints[(a, b)], _ = setting.classical_slopes(kappa, tag)
        if n + 1 < len(products):
            continue
        grid = partial_grid_solve(constraints, symmetry=sym)
        if grid.unique:
            break
        log.info("grid for %s not unique after %d products", kappa.display(), len(constraints))
    return grid, constraints


# -- config ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    preset: str = None
    field: int = None
    prime: int = None
    level: str = None
    weights: list = dataclasses.field(default_factory=list)
    operators: list = dataclasses.field(default_factory=lambda: ["U_p"])
    R: list = dataclasses.field(default_factory=lambda: ["classical"])
    slope_bound: object = None
    precision: int = None
    cache_dir: str = None
    out: str = "out"
    formats: list = dataclasses.field(default_factory=lambda: ["json-lines", "tsv"])
    fixture: str = None
    grids: list = dataclasses.field(default_factory=list)


_CONFIG_KEYS = set(RunConfig.__dataclass_fields__)


def load_config(path):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise IoFailure("cannot read config %s" % path) from exc
    except yaml.YAMLError as exc:
        raise ConfigInvalid("config %s is not valid YAML: %s" % (path, exc)) from exc
    return config_from_dict(data)


def config_from_dict(data):
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigInvalid("unknown config field(s): %s" % ", ".join(sorted(unknown)))
    cfg = RunConfig(**data)
    for key in ("weights", "operators", "R", "formats", "grids"):
        val = getattr(cfg, key)
        if val is None:
            setattr(cfg, key, [])
        elif not isinstance(val, list):
            setattr(cfg, key, [val])
    for fmt in cfg.formats:
        if fmt not in FORMATS:
            raise ConfigInvalid("formats: unknown format %r" % fmt)
    for r in cfg.R:
        if r != "classical" and not (isinstance(r, int) and r > 0):
            raise ConfigInvalid("R: entries must be positive integers or 'classical', got %r" % (r,))
    if cfg.slope_bound is not None:
        try:
            cfg.slope_bound = Fraction(str(cfg.slope_bound))
        except ValueError as exc:
            raise ConfigInvalid("slope_bound: %s" % exc) from exc
    for w in cfg.weights + cfg.grids:
        parse_weight(w)
    return cfg


def run(cfg):
    """Execute a RunConfig and return the report (also written to cfg.out)."""
    report = SlopeReport()
    if not cfg.weights and not cfg.grids:
        return report
    setting = resolve_setting(cfg.field, cfg.prime, cfg.level, cfg.preset, cfg.cache_dir)
    fixture = read_fixture(cfg.fixture) if cfg.fixture else None
    for w in cfg.weights:
        kappa = make_weight(setting, w)
        if not kappa.nebentypus_ok():
            raise ConfigInvalid("weight %s: character fails the nebentypus condition" % w)
        for op in cfg.operators:
            tag = operator_tag(setting, op)
            for R in cfg.R:
                log.info("%s %s R=%s", w, op, R)
                try:
                    if R == "classical":
                        rec = compute_classical(setting, kappa, tag)
                    else:
                        rec = compute_overconvergent(setting, kappa, tag, R, cfg.slope_bound, cfg.precision)
                except HmfError as exc:
                    raise type(exc)("%s (weight %s, operator %s, R=%s)" % (exc, w, op, R)) from exc
                rec.operator = op
                rec.weight = w
                if fixture is not None:
                    want = fixture_row(fixture, op, w, R)
                    if want is not None:
                        horizon = rec.certified_upto if R != "classical" else None
                        ok = compare_within(rec.slopes, want, cfg.slope_bound, horizon)
                        rec.verdict = "match" if ok else "mismatch"
                report.records.append(rec)
    for w in cfg.grids:
        kappa = make_weight(setting, w)
        grid, cons = compute_grid(setting, kappa)
        rec = GridRecord(cfg.preset or "d%d-p%d" % (setting.d, setting.p), w, grid, cons)
        expected = read_grids().get((rec.setting, w))
        if expected is not None:
            rec.verdict = "match" if grid.as_rows() == expected[2] else "mismatch"
        report.grids.append(rec)
    for fmt in cfg.formats:
        emit(report, fmt, cfg.out)
    return report


# -- emission ---------------------------------------------------------------------------

def jsonl_lines(report):
    out = []
    for rec in report.records:
        horizon = rec.certified_upto
        for s, m in rec.slopes:
            out.append({"weight": rec.weight, "operator": rec.operator, "R": rec.R,
                        "slope": frac_str(s), "mult": m,
                        "certified": rec.R == "classical" or (horizon is not None and s <= horizon)})
        for s, m in rec.tail:
            out.append({"weight": rec.weight, "operator": rec.operator, "R": rec.R,
                        "slope": frac_str(s), "mult": m, "certified": False})
    return [json.dumps(r, sort_keys=True) for r in out]


def read_jsonl(path):
    """Re-ingest json-lines output as {(operator, weight, R): SMSet of certified pairs}."""
    rows = {}
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            r = json.loads(line)
            if not r["certified"]:
                continue
            rows.setdefault((r["operator"], r["weight"], r["R"]), []).append((Fraction(r["slope"]), r["mult"]))
    return {k: SMSet(v) for k, v in rows.items()}


def tsv_lines(report):
    lines = ["operator\tweight\tR\tsize\tslopes\tcertified_upto\tprecision\tverdict"]
    for rec in report.records:
        lines.append("\t".join([
            rec.operator, rec.weight, str(rec.R), str(rec.size), paper_style(rec.slopes),
            "all" if rec.R == "classical" else (frac_str(rec.certified_upto) if rec.certified_upto is not None else "-"),
            str(rec.precision), rec.verdict or "-"]))
    for g in report.grids:
        lines.append("\t".join(["grid", g.weight, "classical", str(g.grid.total()),
                                " / ".join(" ".join(str(x) for x in row) for row in g.grid.as_rows()),
                                "all", "-", g.verdict or "-"]))
    return lines


def _safe(name):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_")


def render_grid_svg(grid, path, title=None):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # text stays text (not glyph paths) and ids are stable, so the file is greppable and reproducible
    with matplotlib.rc_context({"svg.fonttype": "none", "svg.hashsalt": "hmfslopes"}):
        nc, nr = len(grid.cols), len(grid.rows)
        fig, ax = plt.subplots(figsize=(1.0 + 0.6 * nc, 1.0 + 0.6 * nr))
        for i in range(nc):
            for j in range(nr):
                ax.plot(i, j, "k.", markersize=4)
                m = grid.x[i][j]
                if m:
                    ax.text(i + 0.12, j + 0.12, str(m), fontsize=9 if m > 2 else 7)
        ax.set_xticks(range(nc))
        ax.set_xticklabels([frac_str(c) for c in grid.cols])
        ax.set_yticks(range(nr))
        ax.set_yticklabels([frac_str(r) for r in grid.rows])
        ax.set_xlim(-0.5, nc - 0.3)
        ax.set_ylim(-0.5, nr - 0.3)
        ax.grid(True, linestyle="--", linewidth=0.4)
        ax.set_xlabel("U_q1 slope")
        ax.set_ylabel("U_q2 slope")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)


def emit(report, fmt, out_dir):
    try:
        os.makedirs(out_dir, exist_ok=True)
        if fmt == "json-lines":
            path = os.path.join(out_dir, "slopes.jsonl")
            with open(path, "w") as fh:
                for line in jsonl_lines(report):
                    fh.write(line + "\n")
            return [path]
        if fmt == "tsv":
            path = os.path.join(out_dir, "slopes.tsv")
            with open(path, "w") as fh:
                fh.write("\n".join(tsv_lines(report)) + "\n")
            return [path]
        if fmt == "svg-grid":
            paths = []
            for g in report.grids:
                path = os.path.join(out_dir, "grid-%s-%s.svg" % (_safe(g.setting), _safe(g.weight)))
                render_grid_svg(g.grid, path, "Weight %s" % g.weight)
                paths.append(path)
            return paths
    except OSError as exc:
        raise IoFailure("cannot write %s output to %s: %s" % (fmt, out_dir, exc)) from exc
    raise ConfigInvalid("unknown format %r" % fmt)


# -- click ----------------------------------------------------------------------------------

def _setting_options(f):
    f = click.option("--preset", default=None, help="Named setting: " + ", ".join(sorted(PRESETS)))(f)
    f = click.option("--field", type=int, default=None, help="d for F = Q(sqrt d).")(f)
    f = click.option("--prime", type=int, default=None)(f)
    f = click.option("--level", default=None, help="e.g. 9 or 8*p11.2")(f)
    f = click.option("--cache-dir", default=None, type=click.Path())(f)
    return f


def _report_options(f):
    f = click.option("--out", default="out", type=click.Path(), show_default=True)(f)
    f = click.option("--format", "formats", multiple=True, type=click.Choice(FORMATS),
                     default=("json-lines", "tsv"), show_default=True)(f)
    return f


def _fail(exc):
    raise click.ClickException("%s: %s" % (type(exc).__name__, exc))


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Slopes of U_p on quaternionic Hilbert modular forms over real quadratic fields."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command()
@_setting_options
def hecke(preset, field, prime, level, cache_dir):
    """Build (and cache) the class set and the Hecke data at p."""
    try:
        S = resolve_setting(field, prime, level, preset, cache_dir)
        cs = S.class_set()
        S.hecke()
    except HmfError as exc:
        _fail(exc)
    click.echo("level\t%s" % S.level_name())
    click.echo("h\t%d" % cs.h)
    click.echo("orbit_sizes\t%s" % " ".join(str(x) for x in cs.orbit_sizes))
    click.echo("sufficiently_small\t%s" % cs.sufficiently_small)
    from .cache import cache_key
    click.echo("cache_key\t%s" % cache_key(cs))
    if S.cache_path:
        click.echo("cache\t%s" % S.cache_path)


def _run_jobs(preset, field, prime, level, cache_dir, weight, char, tau, ops, Rs, slope_bound,
              precision, out, formats, fixture):
    cfg = RunConfig(preset=preset, field=field, prime=prime, level=level, cache_dir=cache_dir,
                    weights=[], operators=list(ops), R=list(Rs), slope_bound=slope_bound,
                    precision=precision, out=out, formats=list(formats), fixture=fixture)
    try:
        cfg = config_from_dict(cfg.__dict__)
        S = resolve_setting(field, prime, level, preset, cache_dir)
        report = SlopeReport()
        fx = read_fixture(fixture) if fixture else None
        for w in weight:
            kappa = make_weight(S, w, char, tau)
            for op in ops:
                tag = operator_tag(S, op)
                for R in cfg.R:
                    if R == "classical":
                        rec = compute_classical(S, kappa, tag)
                    else:
                        rec = compute_overconvergent(S, kappa, tag, R, cfg.slope_bound, precision)
                    rec.operator = op
                    if fx is not None:
                        want = fixture_row(fx, op, w, R)
                        if want is not None:
                            horizon = rec.certified_upto if R != "classical" else None
                            rec.verdict = "match" if compare_within(rec.slopes, want, cfg.slope_bound, horizon) else "mismatch"
                    report.records.append(rec)
        for fmt in formats:
            emit(report, fmt, out)
    except HmfError as exc:
        _fail(exc)
    for line in tsv_lines(report)[1:]:
        click.echo(line)
    return report


def _job_options(f):
    f = click.option("--weight", multiple=True, required=True, help="e.g. [2,2]psi2 or [2,2]psi2tau^2")(f)
    f = click.option("--char", default=None, help="character tag, e.g. psi2 or psi2:1 or triv")(f)
    f = click.option("--tau", type=int, default=None, help="power of tau at the first place")(f)
    f = click.option("--op", "ops", multiple=True, default=("U_p",), show_default=True,
                     help="U_p, U_q1, U_q2 or a product such as U_p3.1^2*U_p3.2")(f)
    f = click.option("--fixture", default=None, help="fixture file to compare against")(f)
    return f


@main.command()
@_setting_options
@_job_options
@click.option("--R", "Rs", multiple=True, type=int, required=True, help="monomials per class")
@click.option("--slope-bound", default=None, help="certify slopes up to this bound")
@click.option("--precision", type=int, default=None, help="pi-adic precision (default: adaptive)")
@_report_options
def slopes(preset, field, prime, level, cache_dir, weight, char, tau, ops, fixture, Rs,
           slope_bound, precision, out, formats):
    """Overconvergent slopes of a truncated operator."""
    _run_jobs(preset, field, prime, level, cache_dir, weight, char, tau, ops, Rs,
              slope_bound, precision, out, formats, fixture)


@main.command()
@_setting_options
@_job_options
@_report_options
def classical(preset, field, prime, level, cache_dir, weight, char, tau, ops, fixture, out, formats):
    """Slopes on the classical subspace (exact, fully certified)."""
    _run_jobs(preset, field, prime, level, cache_dir, weight, char, tau, ops, ["classical"],
              None, None, out, formats, fixture)


@main.command()
@click.option("--seed", default=None, help="constant seed, e.g. '0:1 1/2:2 1:6 3/2:2 2:1'")
@click.option("--seed-file", default=None, type=click.Path(exists=True),
              help="YAML with g, T and seeds keyed by residues like '0,1'")
@click.option("--g", "g", default=2, show_default=True)
@click.option("--slope-bound", default=None)
@click.option("--k", "k", default=None, help="classical prediction for weight k, e.g. 2,4")
@click.option("--compare", default=None, help="slopes to compare with, as 's:m s:m ...'")
def conjecture(seed, seed_file, g, slope_bound, k, compare):
    """Generate conjectured slopes from seeds and optionally compare."""
    from .structure_lab import SeedMap, classical_prediction, generate_conjectured
    try:
        if seed_file:
            with open(seed_file) as fh:
                data = yaml.safe_load(fh)
            T = int(data.get("T", 1))
            g = int(data.get("g", g))
            seeds = {tuple(int(x) for x in str(key).split(",")): parse_smset(val)
                     for key, val in data["seeds"].items()}
            sd = SeedMap(g, T, seeds)
        elif seed:
            sd = SeedMap.constant(g, parse_smset(seed))
        else:
            raise ConfigInvalid("give --seed or --seed-file")
        if k:
            sm = classical_prediction(sd, tuple(int(x) for x in k.split(",")))
        else:
            if slope_bound is None:
                raise ConfigInvalid("--slope-bound is required without --k")
            sm = generate_conjectured(sd, Fraction(slope_bound))
    except (HmfError, ValueError, KeyError) as exc:
        _fail(exc)
    click.echo(paper_style(sm))
    if compare:
        ok = compare_within(sm, parse_smset(compare), slope_bound)
        click.echo("compare\t%s" % ("match" if ok else "mismatch"))
        if not ok:
            raise SystemExit(1)


@main.command()
@_setting_options
@click.option("--weight", required=True)
@click.option("--char", default=None)
@_report_options
def grid(preset, field, prime, level, cache_dir, weight, char, out, formats):
    """Partial-slope grid from products of the U_q on the classical subspace."""
    try:
        S = resolve_setting(field, prime, level, preset, cache_dir)
        if len(S.primes) != 2:
            raise ConfigInvalid("partial slopes need a split prime")
        kappa = make_weight(S, weight, char)
        g, cons = compute_grid(S, kappa)
        name = preset or "d%d-p%d" % (S.d, S.p)
        rec = GridRecord(name, weight, g, cons)
        expected = read_grids().get((name, weight))
        if expected is not None:
            rec.verdict = "match" if g.as_rows() == expected[2] else "mismatch"
        report = SlopeReport(grids=[rec])
        for fmt in set(formats) | {"svg-grid"}:
            emit(report, fmt, out)
    except HmfError as exc:
        _fail(exc)
    click.echo("cols\t%s" % " ".join(frac_str(c) for c in g.cols))
    click.echo("rows\t%s" % " ".join(frac_str(r) for r in g.rows))
    for row in g.as_rows():
        click.echo(" ".join(str(x) for x in row))
    click.echo("unique\t%s" % g.unique)
    if rec.verdict:
        click.echo("fixture\t%s" % rec.verdict)


@main.command()
@click.option("--h", "h", type=int, required=True)
@click.option("--g", "g", type=int, default=2, show_default=True)
@click.option("--count", type=int, default=4, show_default=True, help="number of Hodge segments")
@_setting_options
@click.option("--weight", default=None, help="also check the Newton polygon of this weight")
@click.option("--R", "R", type=int, default=None)
@click.option("--precision", type=int, default=None)
def hodge(h, g, count, preset, field, prime, level, cache_dir, weight, R, precision):
    """Hodge polygon vertices; with --weight/--R, check that the Newton polygon lies above."""
    verts = hodge_bound(h, g, count)
    click.echo("hodge\t%s" % " ".join("(%d,%s)" % (x, frac_str(y)) for x, y in verts))
    if weight:
        try:
            S = resolve_setting(field, prime, level, preset, cache_dir)
            kappa = make_weight(S, weight)
            A = S.matrix(kappa, "U_p", R=R or 1, M=precision or 200)
            np_poly = newton_slopes(charpoly(A), row_floor(A))
            hv = hodge_bound(S.h, kappa.tuple.g, count)
            ok = verify_np_above_hodge(np_poly, hv)
        except HmfError as exc:
            _fail(exc)
        click.echo("newton_above_hodge\t%s" % ok)
        if not ok:
            raise SystemExit(1)


@main.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def run_cmd(config_path):
    """Run every job of a YAML config and write the report files."""
    try:
        cfg = load_config(config_path)
        report = run(cfg)
    except HmfError as exc:
        _fail(exc)
    for line in tsv_lines(report)[1:]:
        click.echo(line)
    bad = [r for r in report.records + report.grids if r.verdict == "mismatch"]
    if bad:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
