"""Experiment configs, check registry and report emission.

Config grammar: INI-style sections of ``key = value`` lines, no nesting.

    [model]       kind = iid | ar1 | power_law; phi, alpha, j_max as needed
    [marginal]    kind = uniform01 | exponential; rate
    [run]         seed (required), n (comma list), replicates, threads
    [grid]        kind = custom | uniform | dyadic; points | M | m
    [checks]      names = comma list, run in the given order
    [tolerances]  <check name> = float, overrides the check's default
    [check.NAME]  extra parameters for one check

Random streams: check i uses stream prefix (i, 0) for sample paths,
(i, 1) for limit-process samples and (i, 2) for permutations; sub-ensembles
j of a check (one per n) use (i, 0, j).
"""

import configparser
from dataclasses import dataclass, field
import hashlib
import io
import json
import math
import os
import time

import numpy as np

from . import __version__
from .bounds import admissible_p_interval
from .diagnostics import (
    association_probe,
    empirical_copula,
    gaussian_copula_grid,
    indicator_covariance_check,
    marginal_covariance_bound_check,
    si_concavity_report,
    tp2_report,
)
from .empirical import custom_grid, dyadic_grid, empirical_process_matrix, fit_bound_constant, uniform_grid
from .errors import AssocEmpError, ConfigError
from .limit import fdd_distance, limit_covariance_matrix, sample_limit_process
from .sequence_gen import (
    build_gaussian_linear_model,
    exponential,
    sample_paths,
    uniform01,
    verify_decay_certificate,
)

__all__ = [
    "ExperimentConfig",
    "CheckRecord",
    "RunReport",
    "CHECKS",
    "load_config",
    "parse_config",
    "run_experiment",
    "emit_report",
    "render",
    "exit_code",
    "build_model",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("index", "check", "verdict", "statistic", "value")


@dataclass
class ExperimentConfig:
    model: dict
    marginal: dict
    n: list
    replicates: int
    grid: dict
    checks: list
    seed: int
    threads: int = 1
    out_dir: str | None = None
    tolerances: dict = field(default_factory=dict)
    check_params: dict = field(default_factory=dict)

    def canonical(self):
        """Deterministic text form; the config hash is taken over it."""
        payload = {
            "model": self.model, "marginal": self.marginal, "n": self.n, "replicates": self.replicates,
            "grid": self.grid, "checks": self.checks, "seed": self.seed, "tolerances": self.tolerances,
            "check_params": self.check_params,
        }
        return json.dumps(payload, sort_keys=True)

    def config_hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def params(self, name):
        return self.check_params.get(name, {})


def _number(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_config(text, seed=None):
    """Parse config text into an :class:`ExperimentConfig`; ``seed`` overrides [run] seed."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    sec = lambda name: dict(cp[name]) if cp.has_section(name) else {}  # noqa: E731
    model = {k: _number(v) for k, v in sec("model").items()}
    model.setdefault("kind", "iid")
    marginal = {k: _number(v) for k, v in sec("marginal").items()}
    marginal.setdefault("kind", "uniform01")
    run = sec("run")
    if seed is None:
        if "seed" not in run:
            raise ConfigError("[run] seed is required")
        seed = int(run["seed"])
    n = [int(v) for v in _list(run.get("n", "1024"))]
    replicates = int(run.get("replicates", "100"))
    if not n or min(n) < 1 or replicates < 1:
        raise ConfigError("n and replicates must be positive")
    grid = {k: v for k, v in sec("grid").items()}
    grid.setdefault("kind", "custom")
    checks = _list(sec("checks").get("names", ""))
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}")
    tolerances = {k: float(v) for k, v in sec("tolerances").items()}
    check_params = {}
    for name in cp.sections():
        if name.startswith("check."):
            check_params[name[6:]] = {k: _number(v) for k, v in cp[name].items()}
    return ExperimentConfig(model, marginal, n, replicates, grid, checks, int(seed),
                            int(run.get("threads", "1")), run.get("out"), tolerances, check_params)


def load_config(path, seed=None):
    with open(path) as fh:
        return parse_config(fh.read(), seed=seed)


def build_model(entries):
    entries = dict(entries)
    kind = entries.pop("kind")
    return build_gaussian_linear_model(kind, **entries)


def build_marginal(entries):
    kind = entries.get("kind", "uniform01")
    if kind == "uniform01":
        return uniform01()
    if kind == "exponential":
        return exponential(entries.get("rate", 1.0))
    raise ConfigError(f"unknown marginal {kind!r}")


def build_grid(entries):
    kind = entries.get("kind", "custom")
    if kind == "custom":
        return custom_grid([float(v) for v in _list(entries.get("points", "0.1, 0.3, 0.5, 0.7, 0.9"))])
    if kind == "uniform":
        return uniform_grid(int(entries.get("m", 20)))
    if kind == "dyadic":
        return dyadic_grid(int(entries.get("m", 6)))
    raise ConfigError(f"unknown grid kind {kind!r}")


@dataclass
class CheckRecord:
    name: str
    verdict: str
    statistics: dict
    headline: str = ""

    def worst_stat(self):
        if self.headline and self.headline in self.statistics:
            return f"{self.headline}={_fmt(self.statistics[self.headline])}"
        return ""


@dataclass
class RunReport:
    records: list
    config_hash: str
    version: str
    seed: int
    timings: dict = field(default_factory=dict)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


class _Context:
    def __init__(self, config, index):
        self.config = config
        self.index = index
        self.model = build_model(config.model)
        self.marginal = build_marginal(config.marginal)
        self.grid = build_grid(config.grid)

    def param(self, name, key, default):
        return self.config.params(name).get(key, default)

    def tol(self, name, default):
        return self.config.tolerances.get(name, default)

    def ensemble(self, n=None, sub=None):
        prefix = (self.index, 0) if sub is None else (self.index, 0, sub)
        return sample_paths(self.model, self.marginal, n or self.config.n[0], self.config.replicates,
                            self.config.seed, threads=self.config.threads, stream_prefix=prefix)


def _verdict(ok):
    return "pass" if ok else "fail"


def _check_fdd(ctx, name, against_bridge):
    ens = ctx.ensemble()
    G = empirical_process_matrix(ens, ctx.grid)
    target_model = build_gaussian_linear_model("iid") if against_bridge else ctx.model
    cov = limit_covariance_matrix(target_model, ctx.grid, tail_tol=ctx.param(name, "tail_tol", 1e-6))
    lim = sample_limit_process(cov, ctx.config.replicates, ctx.config.seed, stream_prefix=(ctx.index, 1))
    rep = fdd_distance(G, lim.values, permutations=int(ctx.param(name, "permutations", 499)),
                       seed=ctx.config.seed, stream_prefix=(ctx.index, 2))
    level = ctx.tol(name, 0.01)
    return CheckRecord(name, _verdict(rep.pvalue > level),
                       {"pvalue": rep.pvalue, "energy": rep.energy, "ks_max": rep.ks_max}, "pvalue")


def check_donsker_fdd(ctx):
    return _check_fdd(ctx, "donsker_fdd", True)


def check_limit_fdd(ctx):
    return _check_fdd(ctx, "limit_fdd", False)


def covariance_match(G, gamma, pairs):
    """Sample covariance of G columns vs gamma entries, in MC standard errors."""
    Gc = G - G.mean(axis=0)
    R = len(G)
    out = []
    for i, j in pairs:
        prod = Gc[:, i] * Gc[:, j]
        est = prod.sum() / (R - 1)
        se = prod.std(ddof=1) / math.sqrt(R)
        out.append((i, j, float(est), float(gamma[i, j]), float(abs(est - gamma[i, j]) / se)))
    return out


def check_limit_covariance_match(ctx):
    name = "limit_covariance_match"
    ens = ctx.ensemble()
    G = empirical_process_matrix(ens, ctx.grid)
    cov = limit_covariance_matrix(ctx.model, ctx.grid, tail_tol=ctx.param(name, "tail_tol", 1e-6))
    m = len(ctx.grid)
    pairs = [(i, i) for i in range(m)][:5] if m >= 5 else [(i, j) for i in range(m) for j in range(i, m)][:5]
    rows = covariance_match(G, cov.matrix, pairs)
    worst = max(r[4] for r in rows)
    return CheckRecord(name, _verdict(worst <= ctx.tol(name, 4.0)), {"max_z": worst, "pairs": len(rows)}, "max_z")


def _report_record(name, rep):
    stats = {"worst_violation": rep.worst_violation, "location": ",".join(map(str, rep.location))}
    for k, v in rep.statistics.items():
        if isinstance(v, (int, float)):
            stats[k] = v
    return CheckRecord(name, rep.verdict, stats, "worst_violation")


def check_indicator_covariance(ctx):
    name = "indicator_covariance"
    rep = indicator_covariance_check(ctx.model, int(ctx.param(name, "k_max", 50)), int(ctx.param(name, "m", 20)),
                                     ctx.tol(name, 1e-10))
    return _report_record(name, rep)


def check_si_concavity(ctx):
    name = "si_concavity"
    lags = int(ctx.param(name, "lags", 5))
    M = int(ctx.param(name, "m", 200))
    tol = ctx.tol(name, 1e-8)
    worst = None
    for k in range(1, lags + 1):
        rep = si_concavity_report(gaussian_copula_grid(ctx.model.rho(k), M), tol)
        if worst is None or rep.worst_violation > worst[1].worst_violation:
            worst = (k, rep)
    k, rep = worst
    rec = _report_record(name, rep)
    rec.statistics["lag"] = k
    return rec


def check_empirical_si(ctx):
    name = "empirical_si"
    lag = int(ctx.param(name, "lag", 1))
    M = int(ctx.param(name, "m", 20))
    ens = ctx.ensemble()
    u = ens.uniform_values()
    x, y = u[:, :-lag].ravel(), u[:, lag:].ravel()
    tol = ctx.tol(name, 2.0 / math.sqrt(len(x)))
    return _report_record(name, si_concavity_report(empirical_copula(x, y, M), tol))


def check_tp2(ctx):
    name = "tp2"
    rep = tp2_report(ctx.model.rho(int(ctx.param(name, "lag", 1))), float(ctx.param(name, "half_width", 4.0)),
                     int(ctx.param(name, "m", 200)), ctx.tol(name, 1e-8))
    return _report_record(name, rep)


def check_decay_certificate(ctx):
    name = "decay_certificate"
    cert = verify_decay_certificate(ctx.model, ctx.param(name, "c", 1.0), ctx.param(name, "alpha", 3.0),
                                    int(ctx.param(name, "k_max", ctx.model.j_max or 1)))
    return CheckRecord(name, _verdict(cert.valid),
                       {"margin": cert.margin, "worst_k": cert.worst_k, "complete": int(cert.complete)}, "margin")


def check_association(ctx):
    name = "association"
    rep = association_probe(ctx.ensemble(), sigmas=ctx.tol(name, 3.0))
    return _report_record(name, rep)


def check_marginal_bound(ctx):
    name = "marginal_bound"
    rep = marginal_covariance_bound_check(
        ctx.model, ctx.marginal, int(ctx.param(name, "k_max", 20)), ctx.config.n[0], ctx.config.replicates,
        ctx.config.seed, sigmas=ctx.tol(name, 3.0), threads=ctx.config.threads, stream_prefix=(ctx.index, 0))
    return _report_record(name, rep)


def check_lemma1_fit(ctx):
    name = "lemma1_fit"
    p = float(ctx.param(name, "p", 4.5))
    nu = float(ctx.param(name, "nu", 0.1))
    alpha = float(ctx.param(name, "alpha", ctx.config.model.get("alpha", 3.0)))
    levels = range(1, int(ctx.param(name, "delta_levels", 6)) + 1)
    pairs = [(0.5 - 2.0**-j / 2, 0.5 + 2.0**-j / 2) for j in levels]
    ensembles = [ctx.ensemble(n, sub=j) for j, n in enumerate(sorted(ctx.config.n))]
    fit = fit_bound_constant(ensembles, pairs, p, nu, alpha)
    by_n = fit.k_hat_by_n()
    first, last = by_n[min(by_n)], by_n[max(by_n)]
    growth = last / first if first > 0 else 0.0
    return CheckRecord(name, _verdict(growth <= ctx.tol(name, 2.0)),
                       {"k_hat": fit.K_hat, "k_hat_min_n": first, "k_hat_max_n": last, "growth": growth}, "growth")


def check_exponents(ctx):
    name = "exponents"
    alpha = float(ctx.param(name, "alpha", ctx.config.model.get("alpha", 3.0)))
    iv = admissible_p_interval(alpha)
    ok = not iv.empty
    stats = {"alpha": alpha, "p_lower": iv.lower, "p_upper": iv.upper, "admissible": int(ok)}
    if ok:
        p = iv.midpoint()
        ok = p / 2 - alpha > 1 - p / 2 and alpha > (p + 1) / 2 and (1 - 1 / alpha) * p / 2 > 1
    return CheckRecord(name, _verdict(ok), stats, "admissible")


CHECKS = {
    "donsker_fdd": check_donsker_fdd,
    "limit_fdd": check_limit_fdd,
    "limit_covariance_match": check_limit_covariance_match,
    "indicator_covariance": check_indicator_covariance,
    "si_concavity": check_si_concavity,
    "empirical_si": check_empirical_si,
    "tp2": check_tp2,
    "decay_certificate": check_decay_certificate,
    "association": check_association,
    "marginal_bound": check_marginal_bound,
    "lemma1_fit": check_lemma1_fit,
    "exponents": check_exponents,
}


def run_experiment(config):
    """Run the configured checks in order; failures of one check do not stop the run."""
    records, timings = [], {}
    for index, name in enumerate(config.checks):
        t0 = time.perf_counter()
        try:
            rec = CHECKS[name](_Context(config, index))
        except (AssocEmpError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            rec = CheckRecord(name, "error", {"error": f"{type(exc).__name__}: {exc}"}, "error")
        records.append(rec)
        timings[f"{index}:{name}"] = time.perf_counter() - t0
    return RunReport(records, config.config_hash(), __version__, config.seed, timings)


def exit_code(report):
    """0 all pass, 1 some check failed, 2 some check errored."""
    verdicts = {r.verdict for r in report.records}
    if "error" in verdicts:
        return 2
    return 1 if "fail" in verdicts else 0


def render(report, fmt):
    """Report body as text in one of 'csv', 'jsonl', 'text'."""
    buf = io.StringIO()
    if fmt == "csv":
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for i, rec in enumerate(report.records):
            for key, val in rec.statistics.items():
                buf.write(f"{i},{rec.name},{rec.verdict},{key},{_csv_cell(_fmt(val))}\n")
    elif fmt == "jsonl":
        for rec in report.records:
            buf.write(json.dumps({"check": rec.name, "verdict": rec.verdict, **rec.statistics}) + "\n")
    elif fmt == "text":
        for rec in report.records:
            buf.write(f"{rec.name} {rec.verdict} {rec.worst_stat()}".rstrip() + "\n")
    else:
        raise ConfigError(f"unknown report format {fmt!r}")
    return buf.getvalue()


def _csv_cell(text):
    return f'"{text}"' if ("," in text or '"' in text) else text


_EXT = {"csv": "report.csv", "jsonl": "report.jsonl", "text": "report.txt"}


def emit_report(report, out_dir, fmt="text"):
    """Write the report body and a timing sidecar; returns the body path."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        body = os.path.join(out_dir, _EXT[fmt] if fmt in _EXT else "report")
        text = render(report, fmt)
        with open(body, "w", newline="") as fh:
            fh.write(text)
        meta = {"config_hash": report.config_hash, "version": report.version, "seed": report.seed,
                "timings_s": report.timings, "written_at": time.strftime("%Y-%m-%dT%H:%M:%S")}
        with open(os.path.join(out_dir, "timings.json"), "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
    except OSError as exc:
        raise OSError(f"cannot write report to {out_dir}: {exc}") from exc
    return body
