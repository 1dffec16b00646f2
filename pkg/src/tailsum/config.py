"""Run configuration: INI-style sections of ``key = value`` lines.

Example::

    [severity]
    kind = lognormal
    sigma = 2.0

    [frequency]
    kind = poisson
    lambda = 100

    [run]
    alphas = 0.99, 0.999
    orders = 1, 2, 3
    methods = SL, OW_star, PERT

    [mc]
    n_samples = 1000000
    seed = 7
    chunks = 4

    [sweep]
    axis = sigma
    values = 1.5, 2, 2.5
"""

import configparser
import math
import re
from dataclasses import dataclass, field, replace

from .bell import K_MAX
from .errors import ConfigError, TailsumError
from .frequency import make_frequency
from .methods import parse_method
from .montecarlo import DEFAULT_SEED
from .severity import make_severity

SEVERITY_KEYS = {"levy": ("c",), "lognormal": ("sigma",), "pareto": ("a",)}
FREQUENCY_KEYS = {
    "deterministic": ("n",),
    "poisson": ("lambda",),
    "negbinomial": ("p", "r"),
    "generic": ("probs",),
}
RUN_KEYS = ("alphas", "orders", "methods", "output")
MC_KEYS = ("n_samples", "seed", "chunks")
SWEEP_KEYS = ("axis", "values")
SWEEP_AXES = ("alpha", "sigma", "a", "lambda", "order")
SECTIONS = ("severity", "frequency", "run", "mc", "sweep")
SEED_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class MonteCarloConfig:
    n_samples: int
    seed: int = DEFAULT_SEED
    chunks: int = 1


@dataclass(frozen=True)
class SweepConfig:
    axis: str
    values: tuple


@dataclass(frozen=True)
class RunConfig:
    severity_kind: str
    severity_params: dict
    frequency_kind: str
    frequency_params: dict
    alphas: tuple = ()
    orders: tuple = (3,)
    methods: tuple = ()  # (id, fixed order or None)
    mc: MonteCarloConfig = None
    sweep: SweepConfig = None
    output: str = None
    source: str = field(default="<string>", compare=False)

    def severity(self):
        return make_severity(self.severity_kind, **self.severity_params)

    def frequency(self):
        params = dict(self.frequency_params)
        if self.frequency_kind == "generic":
            params["p"] = params.pop("probs")
        return make_frequency(self.frequency_kind, **params)

    def with_seed(self, seed):
        if self.mc is None:
            raise ConfigError("--seed given but the config has no [mc] section")
        return replace(self, mc=replace(self.mc, seed=_seed(str(seed), "--seed")))


def _line_index(text):
    """``{(section, key): line}`` for error messages."""
    idx, section = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"^\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            idx.setdefault((section, None), no)
            continue
        m = re.match(r"^([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            idx.setdefault((section, m.group(1).strip().lower()), no)
    return idx


class _Ctx:
    def __init__(self, source, lines):
        self.source = source
        self.lines = lines

    def where(self, section, key=None):
        no = self.lines.get((section, key)) or self.lines.get((section, None))
        loc = f"{self.source}:{no}" if no else self.source
        return f"{loc}: [{section}]" + (f" {key}" if key else "")

    def fail(self, section, key, msg):
        raise ConfigError(f"{self.where(section, key)}: {msg}")


def _floats(raw, ctx, section, key):
    try:
        out = tuple(float(v) for v in raw.replace(";", ",").split(",") if v.strip())
    except ValueError:
        ctx.fail(section, key, f"expected comma-separated numbers, got {raw!r}")
    if not all(math.isfinite(v) for v in out):
        ctx.fail(section, key, f"non-finite value in {raw!r}")
    return out


def _int(raw, ctx, section, key, lo=None):
    try:
        v = int(raw.strip())
    except ValueError:
        ctx.fail(section, key, f"expected an integer, got {raw!r}")
    if lo is not None and v < lo:
        ctx.fail(section, key, f"must be >= {lo}, got {v}")
    return v


def _seed(raw, where):
    try:
        v = int(raw.strip(), 0)
    except ValueError:
        raise ConfigError(f"{where}: seed must be an unsigned 64-bit integer, got {raw!r}") from None
    if not 0 <= v <= SEED_MAX:
        raise ConfigError(f"{where}: seed {v} outside [0, 2^64)")
    return v


def _model_params(sec, allowed, ctx, name):
    kind = sec.get("kind")
    if kind is None:
        ctx.fail(name, None, "missing key 'kind'")
    kind = kind.strip().lower()
    if kind not in allowed:
        ctx.fail(name, "kind", f"unknown kind {kind!r}; expected one of {', '.join(allowed)}")
    params = {}
    for key, raw in sec.items():
        if key == "kind":
            continue
        if key not in allowed[kind]:
            ctx.fail(name, key, f"unknown key for kind {kind!r}; allowed: {', '.join(allowed[kind])}")
        if key == "probs":
            params[key] = _floats(raw, ctx, name, key)
        elif key == "n":
            params[key] = _int(raw, ctx, name, key, lo=0)
        else:
            vals = _floats(raw, ctx, name, key)
            if len(vals) != 1:
                ctx.fail(name, key, f"expected a single number, got {raw!r}")
            params[key] = vals[0]
    missing = [k for k in allowed[kind] if k not in params and not (kind == "levy" and k == "c")]
    if missing:
        ctx.fail(name, None, f"missing key(s) {', '.join(missing)} for kind {kind!r}")
    return kind, params


def parse_config(text, source="<string>"):
    """Parse and fully validate a run configuration."""
    ctx = _Ctx(source, _line_index(text))
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                   default_section="__defaults__")
    try:
        cp.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError(f"{source}: {e}") from None
    for name in cp.sections():
        if name.lower() not in SECTIONS:
            ctx.fail(name.lower(), None, f"unknown section; expected one of {', '.join(SECTIONS)}")
    secs = {name.lower(): cp[name] for name in cp.sections()}
    for need in ("severity", "frequency"):
        if need not in secs:
            raise ConfigError(f"{source}: missing section [{need}]")

    sev_kind, sev_params = _model_params(secs["severity"], SEVERITY_KEYS, ctx, "severity")
    freq_kind, freq_params = _model_params(secs["frequency"], FREQUENCY_KEYS, ctx, "frequency")

    run = secs.get("run", {})
    for key in run:
        if key not in RUN_KEYS:
            ctx.fail("run", key, f"unknown key; allowed: {', '.join(RUN_KEYS)}")
    alphas = _floats(run.get("alphas", ""), ctx, "run", "alphas")
    for a in alphas:
        if not 0.0 < a < 1.0:
            ctx.fail("run", "alphas", f"alpha={a!r} not in (0, 1)")
    orders = tuple(sorted({_int(v, ctx, "run", "orders", lo=0) for v in run.get("orders", "3").split(",") if v.strip()}))
    for k in orders:
        if k > K_MAX:
            ctx.fail("run", "orders", f"order {k} above the supported maximum {K_MAX}")
    methods = []
    for tok in _split_methods(run.get("methods", "")):
        try:
            mid, fixed = parse_method(tok)
        except TailsumError as e:
            ctx.fail("run", "methods", str(e))
        if fixed is not None and fixed > K_MAX:
            ctx.fail("run", "methods", f"{tok}: order above the supported maximum {K_MAX}")
        if (mid, fixed) not in methods:
            methods.append((mid, fixed))

    mc = None
    if "mc" in secs:
        sec = secs["mc"]
        for key in sec:
            if key not in MC_KEYS:
                ctx.fail("mc", key, f"unknown key; allowed: {', '.join(MC_KEYS)}")
        if "n_samples" not in sec:
            ctx.fail("mc", None, "missing key 'n_samples'")
        n = int(_floats(sec["n_samples"], ctx, "mc", "n_samples")[0])
        if n < 1:
            ctx.fail("mc", "n_samples", "must be positive")
        seed = _seed(sec["seed"], ctx.where("mc", "seed")) if "seed" in sec else DEFAULT_SEED
        chunks = _int(sec.get("chunks", "1"), ctx, "mc", "chunks", lo=1)
        mc = MonteCarloConfig(n, seed, chunks)

    sweep = None
    if "sweep" in secs:
        sec = secs["sweep"]
        for key in sec:
            if key not in SWEEP_KEYS:
                ctx.fail("sweep", key, f"unknown key; allowed: {', '.join(SWEEP_KEYS)}")
        axis = sec.get("axis", "").strip().lower()
        if axis not in SWEEP_AXES:
            ctx.fail("sweep", "axis", f"axis {axis!r} not in {', '.join(SWEEP_AXES)}")
        values = _floats(sec.get("values", ""), ctx, "sweep", "values")
        if not values:
            ctx.fail("sweep", "values", "empty grid")
        if axis in ("sigma", "a") and axis not in SEVERITY_KEYS[sev_kind]:
            ctx.fail("sweep", "axis", f"severity {sev_kind!r} has no parameter {axis!r}")
        if axis == "lambda" and freq_kind not in ("poisson", "deterministic"):
            ctx.fail("sweep", "axis", "lambda axis needs a poisson or deterministic frequency")
        if axis == "lambda" and freq_kind == "deterministic" and any(v != int(v) for v in values):
            ctx.fail("sweep", "values", "a deterministic count must be an integer")
        if axis == "order" and any(v != int(v) or not 0 <= v <= K_MAX for v in values):
            ctx.fail("sweep", "values", f"orders must be integers in [0, {K_MAX}]")
        if axis == "alpha" and not all(0.0 < v < 1.0 for v in values):
            ctx.fail("sweep", "values", "alphas must lie in (0, 1)")
        sweep = SweepConfig(axis, values)

    cfg = RunConfig(sev_kind, sev_params, freq_kind, freq_params, alphas, orders, tuple(methods),
                    mc, sweep, run.get("output"), source)
    # model invariants are checked by constructing the models
    try:
        for point in sweep_points(cfg):
            point.severity()
            point.frequency()
    except TailsumError as e:
        raise ConfigError(f"{source}: {e}") from None
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"{source}: invalid model parameters: {e}") from None
    return cfg


def _split_methods(raw):
    # commas inside PERT(k) never occur, so a plain split is enough
    return [t for t in re.split(r"[,\s]+", raw) if t]


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path!r}: {e.strerror}") from None
    return parse_config(text, source=str(path))


def sweep_points(cfg):
    """Configs for each grid point, in grid order (the config itself without a sweep).

    The alpha and order axes are carried inside a single point: one sample
    set then serves every alpha, and baseline rows are not repeated.
    """
    if cfg.sweep is None:
        return [cfg]
    axis, vals = cfg.sweep.axis, cfg.sweep.values
    if axis == "alpha":
        return [replace(cfg, alphas=tuple(sorted(set(vals))))]
    if axis == "order":
        return [replace(cfg, orders=tuple(sorted({int(v) for v in vals})))]
    out = []
    for v in vals:
        if axis in ("sigma", "a"):
            out.append(replace(cfg, severity_params={**cfg.severity_params, axis: v}))
        elif cfg.frequency_kind == "poisson":
            out.append(replace(cfg, frequency_params={**cfg.frequency_params, "lambda": v}))
        else:
            out.append(replace(cfg, frequency_params={**cfg.frequency_params, "n": int(v)}))
    return out
