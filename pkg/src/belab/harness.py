"""Experiment orchestration: rate sweeps, certificates, Esseen comparisons, tail studies.

An experiment is described by a JSON document (``"spec_version": 1``). The
output files depend only on the configuration and its seeds, never on the
thread count.
"""

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, arithmetic, checks, fourier, kolmogorov, laws, sphere
from .errors import BudgetExceeded, ConfigError, DegenerateFit, QuadratureFailure
from .rng import stream

SCENARIOS = ("rate", "certify", "esseen", "sphere-tails", "check-lemmas")
OUT_ENV = "BELAB_OUT"
SNR_LIMIT = 0.25

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_BUDGET, EXIT_QUADRATURE = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "points": [list(p) for p in self.points]}


def fit_rate(points):
    """Least squares of ln(distance) on ln(n)."""
    points = [(int(n), float(d)) for n, d in points]
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    ns = np.array([p[0] for p in points], dtype=float)
    ds = np.array([p[1] for p in points])
    if np.any(ds <= 0):
        raise ValueError("distances must be positive")
    if len(set(ns.tolist())) < 2:
        raise DegenerateFit("all n are equal")
    x, y = np.log(ns), np.log(ds)
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym))) / sxx
    intercept = float(ym - slope * xm)
    ss_tot = float(np.sum((y - ym) ** 2))
    ss_res = float(np.sum((y - intercept - slope * x) ** 2))
    r2 = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1 - ss_res / ss_tot))
    return RateFit(slope, intercept, r2, tuple(points))


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    law: object = "rademacher"
    theta: object = "uniform"
    n: tuple = (8, 12, 16, 20, 24)
    budget: int = kolmogorov.DEFAULT_ATOM_BUDGET
    seed: int = 0
    mc_samples: int = 10**5
    alpha: float = 0.05
    grid_step: float = arithmetic.DEFAULT_GRID_STEP
    R_tol: float = arithmetic.DEFAULT_R_TOL
    R: float | None = None
    T: tuple = (2.0, 5.0, 10.0, 20.0, 40.0)
    samples: int = 10**5
    directions: int = 0
    expect: dict = field(default_factory=dict)
    output: str | None = None

    def digest(self):
        d = self.to_dict()
        d.pop("output", None)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def to_dict(self):
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["n"] = list(self.n)
        d["T"] = list(self.T)
        d["spec_version"] = 1
        return d


_DEFAULTS = {
    "certify": {"theta": "theta0", "n": (8, 16, 32, 64)},
    "esseen": {"n": (1, 2, 4, 8, 12)},
    "sphere-tails": {"law": "bernoulli(0.25)", "n": (32,)},
    "check-lemmas": {"n": (1,)},
}


def load_config(source=None, scenario=None, seed=None, budget=None):
    """Build and validate a config from a path, a dict or nothing (scenario defaults)."""
    if source is None:
        raw = {}
    elif isinstance(source, dict):
        raw = dict(source)
    else:
        try:
            raw = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    version = raw.pop("spec_version", 1)
    if version != 1:
        raise ConfigError(f"unsupported spec_version {version!r}")
    if scenario is not None:
        if raw.get("scenario", scenario) != scenario:
            raise ConfigError(f"config is for scenario {raw['scenario']!r}, not {scenario!r}")
        raw["scenario"] = scenario
    if raw.get("scenario") not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}")
    base = dict(_DEFAULTS.get(raw["scenario"], {}))
    base.update(raw)
    if seed is not None:
        base["seed"] = seed
    if budget is not None:
        base["budget"] = budget
    unknown = set(base) - set(ExperimentConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    for key in ("n", "T"):
        if key in base:
            base[key] = tuple(base[key]) if isinstance(base[key], (list, tuple)) else (base[key],)
    try:
        cfg = ExperimentConfig(**base)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    validate(cfg)
    return cfg


def validate(cfg):
    if not cfg.n or any(int(n) != n or n < 1 for n in cfg.n):
        raise ConfigError("n must be a nonempty list of positive integers")
    if cfg.theta == "theta0" and any(n % 4 for n in cfg.n):
        raise ConfigError("theta0 needs every n divisible by 4")
    if not 0 <= int(cfg.seed) < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if cfg.budget < 1 or cfg.mc_samples < 1000 or not 0 < cfg.alpha < 1:
        raise ConfigError("budget, mc_samples or alpha out of range")
    if cfg.grid_step > 1e-2 or cfg.R_tol < 1e-3:
        raise ConfigError("grid_step must be <= 1e-2 and R_tol >= 1e-3")
    if any(T <= 0 for T in cfg.T):
        raise ConfigError("T values must be positive")
    try:
        make_law(cfg)
        for n in cfg.n:
            make_theta(cfg, n)
    except (ValueError, KeyError, TypeError, ArithmeticError) as exc:
        raise ConfigError(str(exc)) from exc


def make_law(cfg):
    return laws.parse_law(cfg.law)


def make_theta(cfg, n, task=0):
    spec = cfg.theta
    if spec == "uniform":
        return arithmetic.uniform_theta(n)
    if spec == "theta0":
        return arithmetic.theta_zero(n)
    if isinstance(spec, str) and spec.startswith("random"):
        inner = spec[len("random"):].strip("() ")
        seed = int(inner) if inner else cfg.seed
        return random_theta(seed, n, task)
    if isinstance(spec, dict) and "random" in spec:
        return random_theta(int(spec["random"]), n, task)
    if isinstance(spec, (list, tuple)):
        coords = np.asarray(spec, dtype=float)
        if len(coords) != n:
            raise ValueError(f"explicit theta has length {len(coords)}, n = {n}")
        return arithmetic.CoefficientVector.normalized(coords)
    raise ValueError(f"unknown theta spec {spec!r}")


def random_theta(seed, n, task=0):
    return arithmetic.CoefficientVector.normalized(stream(seed, n, task).standard_normal(n))


def theta_label(cfg):
    """CSV-safe name for the direction family."""
    spec = cfg.theta
    if isinstance(spec, str):
        return spec.replace(",", ";")
    if isinstance(spec, dict):
        return f"random({spec['random']})"
    digest = arithmetic.CoefficientVector.normalized(np.asarray(spec, dtype=float)).digest()
    return f"explicit:{digest[:12]}"


# Output ---------------------------------------------------------------------

def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else ("inf" if f > 0 else "-inf" if f < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def metadata_lines(cfg):
    return [
        f"config_digest: {cfg.digest()}",
        f"scenario: {cfg.scenario}",
        f"seed: {cfg.seed}",
        f"belab: {__version__}",
        f"numpy: {np.__version__}",
        "spec_version: 1",
    ]


def write_csv(path, header, rows, cfg, extra=()):
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    lines += [f"# {line}" for line in list(extra) + metadata_lines(cfg)]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, obj):
    Path(path).write_text(json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n")


@dataclass
class RunResult:
    code: int
    messages: list
    files: list


def _pool_map(threads):
    if threads and threads > 1:
        pool = ThreadPoolExecutor(threads)

        def pmap(fn, items):
            return list(pool.map(fn, items))
        return pmap, pool
    return (lambda fn, items: [fn(i) for i in items]), None


# Scenarios --------------------------------------------------------------------

def _distance(cfg, theta, law, threads):
    try:
        est = kolmogorov.exact_distance(theta, law, cfg.budget)
    except BudgetExceeded:
        est = kolmogorov.mc_distance(theta, law, cfg.mc_samples, cfg.alpha, cfg.seed, threads=1)
    return est


def scenario_rate(cfg, out, pmap, threads):
    law = make_law(cfg)
    prof = laws.moments(law)

    def work(n):
        theta = make_theta(cfg, n)
        return n, _distance(cfg, theta, law, threads)

    results = pmap(work, list(cfg.n))
    rows, msgs = [], []
    for n, est in results:
        rows.append([n, theta_label(cfg), est.method.value, est.value, est.interval_form_bound,
                     est.confidence_radius, est.sample_count,
                     kolmogorov.classical_be_bound(prof, n)])
        if est.method is kolmogorov.Method.MONTE_CARLO and est.confidence_radius > SNR_LIMIT * est.value:
            msgs.append(f"n={n}: Monte Carlo radius {est.confidence_radius:.3g} exceeds "
                        f"{SNR_LIMIT} x distance {est.value:.3g}; raise mc_samples or budget")
    header = ["n", "theta", "method", "distance", "interval_bound", "confidence_radius",
              "samples", "classical_be_bound"]
    files = []
    if msgs:
        write_csv(out / "rate.csv", header, rows, cfg, extra=["fit: refused (signal-to-noise)"])
        return RunResult(EXIT_BUDGET, msgs, [out / "rate.csv"])
    fit = fit_rate([(n, est.value) for n, est in results]) if len(results) >= 3 else None
    extra = [] if fit is None else [f"fit: slope={fit.slope!r} intercept={fit.intercept!r} "
                                    f"r_squared={fit.r_squared!r}"]
    write_csv(out / "rate.csv", header, rows, cfg, extra=extra)
    files.append(out / "rate.csv")
    if fit is not None:
        write_json(out / "rate_fit.json", {"fit": fit.to_dict(), "config_digest": cfg.digest()})
        files.append(out / "rate_fit.json")
        msgs.append(f"slope {fit.slope:.4f} (r^2 {fit.r_squared:.4f})")
    if cfg.directions > 0:
        files.append(_quantile_report(cfg, law, prof, out, pmap))
    code = EXIT_OK
    for key, ok in _rate_expectations(cfg.expect, fit):
        msgs.append(f"{'PASS' if ok else 'FAIL'} {key}")
        code = code if ok else EXIT_ASSERT
    return RunResult(code, msgs, files)


def _rate_expectations(expect, fit):
    if "slope_max" in expect:
        yield f"slope <= {expect['slope_max']}", fit is not None and fit.slope <= expect["slope_max"]
    if "slope_min" in expect:
        yield f"slope >= {expect['slope_min']}", fit is not None and fit.slope >= expect["slope_min"]


RHO_LEVELS = (0.5, 0.25, 0.1, 0.05)


def _quantile_report(cfg, law, prof, out, pmap):
    """Quantiles of n * distance / delta^4 over random directions, against log^2(1/rho)."""
    delta4 = prof.delta4
    rows = []
    for n in cfg.n:
        def work(i, n=n):
            theta = random_theta(cfg.seed, n, i + 1)
            return _distance(cfg, theta, law, 1).value
        scaled = np.array(pmap(work, range(cfg.directions))) * n / delta4
        for rho in RHO_LEVELS:
            rows.append([n, rho, math.log(1 / rho) ** 2, float(np.quantile(scaled, 1 - rho))])
    path = out / "quantiles.csv"
    write_csv(path, ["n", "rho", "log2_inv_rho", "quantile_scaled_distance"], rows, cfg)
    return path


def scenario_certify(cfg, out, pmap, threads):
    law = make_law(cfg)
    Y = laws.symmetrize(law)
    delta4 = laws.moments(law).delta4

    def work(n):
        theta = make_theta(cfg, n)
        r_i, r_ii = arithmetic.check_conditions_i_ii(theta)
        grid = arithmetic.ConditionGrid(theta, cfg.grid_step)
        upper, lower = arithmetic.minimal_certified_R(theta, cfg.grid_step, cfg.R_tol)
        R = cfg.R if cfg.R is not None else (upper if math.isfinite(upper) else float(n * n))
        cert = grid.certify(max(R, 1.0))
        tail = tail_T = None
        if math.isfinite(upper) and n / (upper * delta4) >= 1:
            tail_T = n / (upper * delta4)
            tail = arithmetic.tail_integral_check(theta, Y, tail_T)
        return n, r_i, r_ii, upper, lower, cert, tail_T, tail

    results = pmap(work, list(cfg.n))
    rows = []
    for n, r_i, r_ii, upper, lower, cert, tail_T, tail in results:
        rows.append([n, theta_label(cfg), r_i, r_ii, upper, lower, cert.R, cert.outcome.value,
                     cert.margin, cert.counterexample_xi, tail_T, tail,
                     None if tail is None else tail * tail_T])
    header = ["n", "theta", "R_i", "R_ii", "R_upper", "R_lower", "R", "outcome", "margin",
              "counterexample_xi", "tail_T", "tail_integral", "T_times_tail"]
    write_csv(out / "certify.csv", header, rows, cfg)
    write_json(out / "certificates.json", [r[5].to_dict() for r in results])
    msgs, code = [], EXIT_OK
    for key, ok in _certify_expectations(cfg.expect, results):
        msgs.append(f"{'PASS' if ok else 'FAIL'} {key}")
        code = code if ok else EXIT_ASSERT
    return RunResult(code, msgs, [out / "certify.csv", out / "certificates.json"])


def _certify_expectations(expect, results):
    if "outcome" in expect:
        yield (f"outcome == {expect['outcome']}",
               all(r[5].outcome.value == expect["outcome"] for r in results))
    if "counterexample_xi" in expect:
        yield (f"counterexample_xi == {expect['counterexample_xi']}",
               all(r[5].counterexample_xi == expect["counterexample_xi"] for r in results))
    if "R_upper_ratio_max" in expect:
        ups = [r[3] for r in results]
        ok = all(math.isfinite(u) for u in ups) and max(ups) <= expect["R_upper_ratio_max"] * min(ups)
        yield f"max R_upper <= {expect['R_upper_ratio_max']} x min R_upper", ok
    if "tail_ratio_max" in expect:
        prods = [r[7] * r[6] for r in results if r[7] is not None]
        ok = len(prods) == len(results) and max(prods) <= expect["tail_ratio_max"] * min(prods)
        yield f"max T*tail <= {expect['tail_ratio_max']} x min T*tail", ok


def scenario_esseen(cfg, out, pmap, threads):
    law = make_law(cfg)
    prof = laws.moments(law)

    def work(n):
        theta = make_theta(cfg, n)
        exact = kolmogorov.exact_distance(theta, law, cfg.budget)
        bound, best_T = fourier.esseen_bound_sweep(theta, law, cfg.T)
        report = fourier.regime_report(theta, law)
        return n, exact, bound, best_T, report

    results = pmap(work, list(cfg.n))
    rows, msgs, code = [], [], EXIT_OK
    for n, exact, bound, best_T, report in results:
        sound = bound >= exact.value - 1e-8
        rows.append([n, theta_label(cfg), exact.value, exact.interval_form_bound, bound, best_T,
                     kolmogorov.classical_be_bound(prof, n), sound, report.epsilon, report.r1,
                     report.r2_min])
        if not sound:
            msgs.append(f"FAIL n={n}: Esseen bound {bound!r} below exact distance {exact.value!r}")
            code = EXIT_ASSERT
    header = ["n", "theta", "exact", "interval_bound", "esseen_bound", "best_T",
              "classical_be_bound", "sound", "epsilon", "r1", "r2_min"]
    write_csv(out / "esseen.csv", header, rows, cfg)
    write_json(out / "esseen_regimes.json",
               [{"n": r[0], "regime_report": r[4].to_dict()} for r in results])
    if code == EXIT_OK:
        msgs.append(f"PASS Esseen bound >= exact distance in {len(rows)} rows")
    return RunResult(code, msgs, [out / "esseen.csv", out / "esseen_regimes.json"])


def scenario_sphere_tails(cfg, out, pmap, threads):
    law = make_law(cfg)
    prof = laws.moments(law)
    results = pmap(lambda n: (n, sphere.deviation_tail_curves(prof, n, cfg.samples, cfg.seed)),
                   list(cfg.n))
    files, msgs, code = [], [], EXIT_OK
    min_r2 = cfg.expect.get("min_r_squared", 0.0)
    for n, tc in results:
        path = out / f"sphere_tails_n{n}.csv"
        write_csv(path, ["t", "survival_skew", "survival_quartic"],
                  zip(tc.t.tolist(), tc.survival_skew.tolist(), tc.survival_quartic.tolist()), cfg,
                  extra=[f"fit_{name}: slope={f.slope!r} intercept={f.intercept!r} "
                         f"r_squared={f.r_squared!r} points={f.points}"
                         for name, f in (("skew", tc.skew_fit), ("quartic", tc.quartic_fit))])
        files.append(path)
        fits = [("quartic", tc.quartic_fit)]
        if not law.is_symmetric:
            fits.append(("skew", tc.skew_fit))
        for name, f in fits:
            ok = f.points >= 2 and f.slope > 0 and f.r_squared >= min_r2
            msgs.append(f"{'PASS' if ok else 'FAIL'} n={n} {name}: slope={f.slope:.4g} "
                        f"r^2={f.r_squared:.4f} points={f.points}")
            code = code if ok else EXIT_ASSERT
    return RunResult(code, msgs, files)


def scenario_check_lemmas(cfg, out, pmap, threads):
    results = checks.run_all(cfg.seed, map_fn=pmap)
    rows = [[r.name.replace(",", ";"), r.cases, r.passed, r.detail.replace(",", ";")]
            for r in results]
    write_csv(out / "check_lemmas.csv", ["check", "cases", "passed", "detail"], rows, cfg)
    msgs = [f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}" for r in results]
    code = EXIT_OK if all(r.passed for r in results) else EXIT_ASSERT
    return RunResult(code, msgs, [out / "check_lemmas.csv"])


_SCENARIO_FUNCS = {
    "rate": scenario_rate,
    "certify": scenario_certify,
    "esseen": scenario_esseen,
    "sphere-tails": scenario_sphere_tails,
    "check-lemmas": scenario_check_lemmas,
}


def resolve_out_dir(cfg, out=None):
    return Path(out or os.environ.get(OUT_ENV) or cfg.output or "belab-out")


def run(cfg, out=None, threads=1):
    """Run one scenario; returns a :class:`RunResult` whose ``code`` is the exit status."""
    out = resolve_out_dir(cfg, out)
    out.mkdir(parents=True, exist_ok=True)
    pmap, pool = _pool_map(threads)
    try:
        return _SCENARIO_FUNCS[cfg.scenario](cfg, out, pmap, threads)
    except ConfigError as exc:
        return RunResult(EXIT_CONFIG, [f"config error: {exc}"], [])
    except BudgetExceeded as exc:
        return RunResult(EXIT_BUDGET, [f"{exc}; raise --budget or use Monte Carlo"], [])
    except QuadratureFailure as exc:
        return RunResult(EXIT_QUADRATURE, [f"quadrature failure: {exc}"], [])
    finally:
        if pool is not None:
            pool.shutdown()


def with_overrides(cfg, **kw):
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
