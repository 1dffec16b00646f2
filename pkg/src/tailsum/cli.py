"""Command-line driver: ``tailsum approx|sweep|mc --config <path>``.

Output is CSV with a version comment line. Floats are written with
``repr`` (shortest round-trip form), so a given config always produces the
same bytes.
"""

import argparse
import csv
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields

from . import _accel
from .config import load_config, sweep_points
from .errors import ConfigError, InsufficientSamplesError, TailsumError
from .frequency import Deterministic
from .levy import LevyExact, exact_quantile
from .methods import evaluate
from .montecarlo import percentile_estimate, quantile_from_samples, sample_compound
from .montecarlo.estimate import MIN_TAIL_SAMPLES
from .severity import Levy

CSV_VERSION = "# tailsum-csv v1"
EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


@dataclass
class ResultRow:
    method: str
    severity: str
    severity_params: str
    frequency: str
    frequency_params: str
    alpha: float
    order: int = None
    estimate: float = None
    oracle: float = None
    oracle_kind: str = None
    rel_error: float = None
    ci_low: float = None
    ci_high: float = None
    seed: int = None
    error: str = None


COLUMNS = tuple(f.name for f in fields(ResultRow))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, int)) and not isinstance(v, float):
        return str(int(v))
    return repr(float(v))


def write_csv(rows, fh):
    fh.write(CSV_VERSION + "\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in astuple(r)])


def _rel(est, oracle):
    if est is None or oracle is None:
        return None
    return (est - oracle) / oracle


def exact_oracle(sev, freq, alpha):
    """Closed-form quantile when one exists, else None."""
    if isinstance(freq, Deterministic):
        if freq.n == 1:
            return sev.isf(1.0 - alpha)
        if isinstance(sev, Levy):
            return exact_quantile(LevyExact(sev.c, freq.n), alpha)
    return None


def _base(cfg, sev, freq, method, alpha, order=None):
    return ResultRow(method, sev.kind, sev.label(), freq.kind, freq.label(), float(alpha), order)


def _mc_oracles(cfg, sev, freq):
    """``{alpha: MonteCarloEstimate or error code}`` from one shared sample set."""
    mc = cfg.mc
    out, ok = {}, []
    for a in cfg.alphas:
        if mc.n_samples * (1.0 - a) < MIN_TAIL_SAMPLES:
            out[a] = InsufficientSamplesError.code
        else:
            ok.append(a)
    if ok:
        x = sample_compound(sev, freq, mc.n_samples, mc.seed, mc.chunks, workers=1)
        for a in ok:
            out[a] = quantile_from_samples(x, a)
    return out


def approx_rows(cfg):
    """One row per (method, alpha, order) for a single grid point."""
    sev, freq = cfg.severity(), cfg.frequency()
    oracles = {}
    for a in cfg.alphas:
        q = exact_oracle(sev, freq, a)
        if q is not None:
            oracles[a] = ("exact", q, None, None, None, None)
    todo = [a for a in cfg.alphas if a not in oracles]
    if todo and cfg.mc is not None and cfg.methods:
        for a, res in _mc_oracles(cfg, sev, freq).items():
            if a not in todo:
                continue
            if isinstance(res, str):
                oracles[a] = (None, None, None, None, None, "oracle:" + res)
            else:
                point, lo, hi = res
                oracles[a] = ("mc", point, lo, hi, cfg.mc.seed, None)

    rows = []
    for mid, fixed in cfg.methods:
        orders = (fixed,) if fixed is not None else (cfg.orders if mid == "PERT" else (None,))
        for a in cfg.alphas:
            for k in orders:
                row = _base(cfg, sev, freq, mid, a, k)
                kind, q, lo, hi, seed, oerr = oracles.get(a, (None,) * 6)
                row.oracle, row.oracle_kind, row.ci_low, row.ci_high, row.seed = q, kind, lo, hi, seed
                try:
                    row.estimate = float(evaluate(mid, sev, freq, a, k))
                except TailsumError as e:
                    row.error = e.code
                else:
                    row.rel_error = _rel(row.estimate, q)
                    row.error = oerr
                rows.append(row)
    rows.sort(key=lambda r: (r.method, r.alpha, -1 if r.order is None else r.order))
    return rows


def mc_rows(cfg):
    """One MC row per alpha for a single grid point."""
    sev, freq = cfg.severity(), cfg.frequency()
    mc = cfg.mc
    rows = []
    for a in sorted(cfg.alphas):
        row = _base(cfg, sev, freq, "MC", a)
        row.seed = mc.seed
        q = exact_oracle(sev, freq, a)
        if q is not None:
            row.oracle, row.oracle_kind = q, "exact"
        try:
            est = percentile_estimate(sev, freq, a, mc.n_samples, mc.seed, mc.chunks, workers=1)
        except InsufficientSamplesError as e:
            row.error = e.code
            print(f"tailsum: alpha={a!r}: {e}", file=sys.stderr)
        except TailsumError as e:
            row.error = e.code
        else:
            row.estimate, row.ci_low, row.ci_high = est.point, est.ci_low, est.ci_high
            row.rel_error = _rel(est.point, q)
        rows.append(row)
    return rows


def _run_points(points, fn, workers=None):
    """Evaluate grid points concurrently; rows come back in grid order."""
    workers = _accel.max_workers() if workers is None else workers
    workers = max(1, min(workers, len(points)))
    if workers == 1:
        parts = [fn(p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, points))
    return [r for part in parts for r in part]


def cmd_approx(cfg):
    return approx_rows(cfg)


def cmd_sweep(cfg):
    if cfg.sweep is None:
        raise ConfigError(f"{cfg.source}: sweep needs a [sweep] section")
    return _run_points(sweep_points(cfg), approx_rows)


def cmd_mc(cfg):
    if cfg.mc is None:
        raise ConfigError(f"{cfg.source}: mc needs an [mc] section")
    return _run_points(sweep_points(cfg), mc_rows)


COMMANDS = {"approx": cmd_approx, "sweep": cmd_sweep, "mc": cmd_mc}


def build_parser():
    p = argparse.ArgumentParser(prog="tailsum", description="High percentiles of compound heavy-tailed sums.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("approx", "evaluate methods at the configured alphas and orders"),
        ("sweep", "evaluate methods over the [sweep] grid"),
        ("mc", "Monte Carlo percentile estimates with 95% intervals"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", required=True, help="path to the run configuration")
        sp.add_argument("--out", help="CSV output path (default: [run] output, else stdout)")
        sp.add_argument("--seed", type=str, help="override the [mc] seed (unsigned 64-bit)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        rows = COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"tailsum: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    buf = io.StringIO()
    write_csv(rows, buf)
    out = args.out or cfg.output
    try:
        if out:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            sys.stdout.write(buf.getvalue())
    except OSError as e:
        print(f"tailsum: cannot write {out!r}: {e.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
