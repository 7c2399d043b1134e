"""Experiment runner behind ``modone run``.

A configuration is a flat ``key = value`` text file::

    experiment = ekl-empirical
    generator = malpha
    n = 2000
    L = 1
    samples = 10000
    seed = 7
    out_dir = results

Each experiment writes one or more tables into ``out_dir``; every file
starts with the full configuration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import stats

from . import dioph, homspace, localstats, randmodel, seqgen
from .errors import InvalidArgument
from .export import Table, distribution_table, histogram_table, scalar_table, write_json, write_table
from .localstats import CountDistribution

EXPERIMENTS = ("gaps", "ekl-empirical", "ekl-oracle", "paircorr", "variance", "dioph", "fixed-center", "x-model", "clt")

DEFAULTS: dict[str, object] = {
    "generator": "malpha",
    "alpha": math.sqrt(2.0),
    "n": 2000,
    "L": 1.0,
    "seed": 0,
    "samples": 10_000,
    "out_dir": "out",
    "format": "csv",
}

_INT_KEYS = {"n", "seed", "samples", "k_max", "M", "q_max", "budget", "workers", "num_bins", "n_max"}
_FLOAT_KEYS = {"alpha", "L", "x0", "beta", "bin_width", "B"}


def _parse_value(key: str, raw: str):
    if key in _INT_KEYS:
        try:
            return int(float(raw)) if "e" in raw.lower() else int(raw)
        except ValueError as exc:
            raise InvalidArgument(f"{key} must be an integer, got {raw!r}") from exc
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError as exc:
            raise InvalidArgument(f"{key} must be a number, got {raw!r}") from exc
    return raw


def parse_config(text: str) -> dict[str, object]:
    cfg: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidArgument(f"line {lineno}: expected key = value")
        key, value = key.strip(), value.strip()
        cfg[key] = _parse_value(key, value)
    return cfg


def load_config(path) -> dict[str, object]:
    return parse_config(Path(path).read_text())


def resolve(cfg: Mapping[str, object]) -> dict[str, object]:
    """Fill defaults and validate the common keys."""
    out = dict(DEFAULTS)
    out.update({k: _parse_value(k, v) if isinstance(v, str) else v for k, v in cfg.items()})
    exp = out.get("experiment")
    if exp not in EXPERIMENTS:
        raise InvalidArgument(f"unknown experiment {exp!r}; choose from {', '.join(EXPERIMENTS)}")
    if int(out["n"]) < 1:
        raise InvalidArgument("n must be >= 1")
    if int(out["samples"]) < 1:
        raise InvalidArgument("samples must be >= 1")
    if "budget" in out and int(out["budget"]) < 1:
        raise InvalidArgument("budget must be a positive integer")
    if out["format"] not in ("csv", "json"):
        raise InvalidArgument("format must be csv or json")
    return out


# ------------------------------------------------------------ statistics

def empirical_distribution(counts: np.ndarray, L: float, meta: dict | None = None) -> CountDistribution:
    counts = np.asarray(counts, dtype=np.int64)
    masses = np.bincount(counts) / counts.size
    stderr = np.sqrt(masses * (1.0 - masses) / counts.size)
    return CountDistribution(masses, L, stderr, dict(meta or {}))


def malpha_counts(n: int, Ls: Sequence[float], samples: int, seed: int, x0: float | None = None) -> np.ndarray:
    """Closed-window counts of ``{m alpha}``, m <= n, over random draws.

    Each draw takes ``alpha`` uniform on [0, 1) and, unless ``x0`` is fixed,
    a uniform centre. Returns an array of shape ``(len(Ls), samples)``.
    """
    rng = np.random.default_rng(seed)
    alphas = rng.random(samples)
    centres = rng.random(samples) if x0 is None else np.full(samples, float(x0))
    out = np.empty((len(Ls), samples), dtype=np.int64)
    for i, (a, c) in enumerate(zip(alphas, centres)):
        pts = seqgen.gen_malpha(float(a), n)
        for j, L in enumerate(Ls):
            out[j, i] = localstats.window_counts(pts, c, L, closed=True)
    return out


def ekl_malpha(n: int, L: float, samples: int, seed: int, x0: float | None = None) -> CountDistribution:
    counts = malpha_counts(n, [L], samples, seed, x0)[0]
    return empirical_distribution(counts, L, {"generator": "malpha", "n": n, "samples": samples, "seed": seed, "x0": x0})


def ekl_sqrt(n: int, L: float, alpha: float = 1.0) -> CountDistribution:
    """Exact E_N(k, L) for ``sqrt(m alpha)`` from the centre sweep."""
    return localstats.count_distribution_exact(seqgen.gen_sqrt_malpha(alpha, n), L)


@dataclass(frozen=True)
class Comparison:
    k: int
    a: float
    b: float
    stderr: float
    z: float

    @property
    def diff(self) -> float:
        return self.a - self.b


def compare_distributions(a: CountDistribution, b: CountDistribution, k_max: int) -> list[Comparison]:
    """Per-k differences in units of the combined standard error."""
    rows = []
    for k in range(k_max + 1):
        se = math.hypot(a.err(k), b.err(k))
        d = a.mass(k) - b.mass(k)
        z = abs(d) / se if se > 0 else (0.0 if d == 0 else math.inf)
        rows.append(Comparison(k, a.mass(k), b.mass(k), se, z))
    return rows


def ks_exponential(gaps: np.ndarray) -> float:
    return float(stats.kstest(gaps, "expon").statistic)


# ----------------------------------------------------------- experiments

def _points(cfg) -> seqgen.OrderedPointArray:
    gen = cfg["generator"]
    n = int(cfg["n"])
    if gen == "malpha":
        return seqgen.gen_malpha(float(cfg["alpha"]), n)
    if gen in ("sqrt", "sqrt_malpha"):
        return seqgen.gen_sqrt_malpha(float(cfg["alpha"]), n)
    if gen == "iid":
        return seqgen.gen_iid_uniform(n, int(cfg["seed"]))
    raise InvalidArgument(f"unknown generator {gen!r}")


def _gaps(cfg):
    pts = _points(cfg)
    conv = cfg.get("convention", "circular")
    g = localstats.gap_statistics(pts, conv)
    hist = localstats.gap_histogram(g, float(cfg.get("bin_width", 0.2)), int(cfg.get("num_bins", 35)))
    scal = [
        ("ks_exponential", ks_exponential(g.gaps), 0.0),
        ("outliers", float(hist.outliers.size), 0.0),
        ("mean_gap", float(g.gaps.mean()), 0.0),
    ]
    return {"gaps_histogram": histogram_table(hist), "gaps_scalars": scalar_table(scal)}


def _ekl_empirical(cfg):
    n, L = int(cfg["n"]), float(cfg["L"])
    if cfg["generator"] == "malpha":
        dist = ekl_malpha(n, L, int(cfg["samples"]), int(cfg["seed"]))
    elif cfg["generator"] in ("sqrt", "sqrt_malpha"):
        dist = ekl_sqrt(n, L, float(cfg["alpha"]) if "alpha" in cfg["_given"] else 1.0)
    elif cfg["generator"] == "iid":
        dist = localstats.count_distribution_exact(_points(cfg), L)
    else:
        raise InvalidArgument(f"unknown generator {cfg['generator']!r}")
    return {"ekl_empirical": distribution_table(dist, int(cfg.get("k_max", 10)))}


def _ekl_oracle(cfg):
    psi = homspace.TestFunction2D(cfg.get("psi", "rectangle"), float(cfg["L"]))
    k_max = int(cfg.get("k_max", 10))
    counts = homspace.haar_counts(psi, int(cfg["samples"]), int(cfg["seed"]), cfg.get("workers"),
                                  int(cfg.get("budget", homspace.DEFAULT_BUDGET)))
    dist = empirical_distribution(counts, psi.L)
    mean_se = float(counts.std(ddof=1) / math.sqrt(counts.size)) if counts.size > 1 else 0.0
    return {
        "ekl_oracle": distribution_table(dist, k_max),
        "ekl_oracle_scalars": scalar_table([("mean", float(counts.mean()), mean_se)]),
    }


def _paircorr(cfg):
    pts = _points(cfg)
    L = float(cfg["L"])
    psi = cfg.get("psi", "triangle")
    direct = localstats.pair_correlation_direct(pts, L, psi)
    four = localstats.pair_correlation_fourier(pts, L, psi, int(cfg.get("n_max", 4096)))
    return {"paircorr": scalar_table([("direct", direct, 0.0), ("fourier", four.value, four.bound)])}


def _variance(cfg):
    pts = _points(cfg)
    L = float(cfg["L"])
    rows = []
    for method in ("identity", "sweep", "monte-carlo"):
        est = localstats.number_variance(pts, L, method, int(cfg["samples"]), int(cfg["seed"]))
        rows.append((method, est.value, est.stderr))
    return {"variance": scalar_table(rows)}


def _dioph(cfg):
    alpha = float(cfg["alpha"])
    q_max = int(cfg.get("q_max", 100_000))
    prof = dioph.dioph_type_estimate(alpha, q_max)
    n = min(int(cfg["n"]), q_max)
    sweep = dioph.counting_sweep(prof, n, int(cfg["samples"]), int(cfg["seed"]), float(cfg.get("B", 4.0)))
    rows = [
        ("kappa_estimate", prof.kappa_estimate, 0.0),
        ("c_estimate", prof.c_estimate, 0.0),
        ("counting_max_ratio", sweep.max_ratio, 0.0),
        ("counting_satisfied", float(sweep.satisfied), 0.0),
    ]
    beta = float(cfg.get("beta", 0.5))
    if beta < 1.0 / (prof.kappa_estimate - 1.0):
        avg = dioph.singular_average(alpha, beta, int(cfg["n"]), prof)
        rows += [("singular_average", avg, 0.0), ("singular_limit", dioph.singular_limit(beta), 0.0)]
    return {"dioph": scalar_table(rows), "dioph_profile": prof.to_dict()}


def _fixed_center(cfg):
    x0 = float(cfg.get("x0", math.sqrt(3.0) - 1.0))
    dist = ekl_malpha(int(cfg["n"]), float(cfg["L"]), int(cfg["samples"]), int(cfg["seed"]), x0=x0)
    return {"fixed_center": distribution_table(dist, int(cfg.get("k_max", 10)))}


def _x_model(cfg):
    M = int(cfg.get("M", 10_000))
    L = float(cfg["L"])
    dist = randmodel.heuristic_x_model(M, L, int(cfg["samples"]), int(cfg["seed"]))
    po = randmodel.poisson_masses(L, dist.masses.size + 10)
    rows = [
        ("tv_poisson", randmodel.total_variation(dist.masses, po), randmodel.tv_stderr(dist)),
        ("mean", dist.mean, dist.meta["mean_stderr"]),
    ]
    return {"x_model": distribution_table(dist, int(cfg.get("k_max", 10))), "x_model_scalars": scalar_table(rows)}


def _clt(cfg):
    n = int(cfg["n"])
    L = float(cfg["L"]) if "L" in cfg.get("_given", ()) else math.sqrt(n)
    res = randmodel.clt_statistic(n, L, int(cfg["samples"]), int(cfg["seed"]))
    return {"clt": scalar_table([("ks_normal", res.ks, 0.0), ("pvalue", res.pvalue, 0.0), ("L", res.L, 0.0)])}


RUNNERS: dict[str, Callable[[dict], dict]] = {
    "gaps": _gaps,
    "ekl-empirical": _ekl_empirical,
    "ekl-oracle": _ekl_oracle,
    "paircorr": _paircorr,
    "variance": _variance,
    "dioph": _dioph,
    "fixed-center": _fixed_center,
    "x-model": _x_model,
    "clt": _clt,
}


def compute(cfg: Mapping[str, object]) -> tuple[dict[str, object], dict[str, object]]:
    """Run an experiment in memory; returns (resolved config, named outputs)."""
    full = resolve(cfg)
    full["_given"] = tuple(sorted(cfg))
    outputs = RUNNERS[str(full["experiment"])](full)
    del full["_given"]
    return full, outputs


def run_experiment(cfg: Mapping[str, object], out_dir=None) -> list[Path]:
    """Run one experiment and write its tables; returns the written paths."""
    full, outputs = compute(cfg)
    if out_dir is not None:
        full["out_dir"] = str(out_dir)
    target = Path(str(full["out_dir"]))
    try:
        target.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InvalidArgument(f"cannot create output directory {target}: {exc}") from exc
    fmt = str(full["format"])
    written = []
    header = {k: v for k, v in full.items() if k != "out_dir"}
    for name, obj in outputs.items():
        try:
            if isinstance(obj, Table):
                written.append(write_table(target / f"{name}.{fmt}", obj, header, fmt))
            else:
                written.append(write_json(target / f"{name}.json", obj, header))
        except OSError as exc:
            raise InvalidArgument(f"cannot write to {target}: {exc}") from exc
    return written
