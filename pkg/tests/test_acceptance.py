"""Acceptance criteria, one test each. Every test prints a single PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from belab import arithmetic as ar
from belab import fourier, harness, kolmogorov, laws

RAD = laws.rademacher()


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}")
        assert ok, detail
    return emit


def test_1_rate_contrast(report):
    start = time.perf_counter()
    ns = (8, 12, 16, 20, 24)
    uni = harness.fit_rate([(n, kolmogorov.exact_distance(ar.uniform_theta(n), RAD).value)
                            for n in ns])
    zero = harness.fit_rate([(n, kolmogorov.exact_distance(ar.theta_zero(n), RAD).value)
                             for n in ns])
    elapsed = time.perf_counter() - start
    ok = -0.6 <= uni.slope <= -0.4 and zero.slope <= -0.8 and elapsed < 60
    report(1, "rate contrast", ok,
           f"uniform slope {uni.slope:.4f} in [-0.6, -0.4], theta0 slope {zero.slope:.4f} <= -0.8, "
           f"{elapsed:.2f}s")


def test_2_binomial_closed_form(report):
    worst = 0.0
    for n in range(2, 25, 2):
        closed = 0.5 * math.comb(n, n // 2) / 2 ** n
        worst = max(worst, abs(kolmogorov.exact_distance(ar.uniform_theta(n), RAD).value - closed))
    p0 = math.comb(24, 12) / 2 ** 24
    asym = (math.pi * 24 / 2) ** -0.5
    rel = abs(p0 - asym) / asym
    report(2, "binomial closed form", worst <= 1e-10 and rel <= 0.05,
           f"max |exact - closed| = {worst:.2e}, P(S=0) at n=24 is {p0:.5f} vs {asym:.5f} "
           f"({100 * rel:.2f}%)")


def test_3_certifier(report):
    start = time.perf_counter()
    ups = {n: ar.minimal_certified_R(ar.theta_zero(n), grid_step=1e-4)[0] for n in (8, 16, 32, 64)}
    R = max(ups.values())
    fixed = all(ar.certify_condition_iii(ar.theta_zero(n), R).certified for n in ups)
    refuted = []
    for n in (4, 16, 64):
        cert = ar.certify_condition_iii(ar.uniform_theta(n), 1e6)
        refuted.append(cert.refuted and cert.counterexample_xi == math.sqrt(n))
    elapsed = time.perf_counter() - start
    ok = fixed and ups[64] <= 2 * ups[8] and all(refuted) and elapsed < 120
    report(3, "certifier", ok,
           f"R_upper {', '.join(f'n={n}: {u:.4f}' for n, u in ups.items())}; theta0 certified at "
           f"R={R:.4f} for all n: {fixed}; uniform refuted at sqrt(n): {all(refuted)}; "
           f"{elapsed:.2f}s")


def esseen_matrix():
    law_pool = {
        "rademacher": RAD,
        "bernoulli(1/4)": laws.standardize(laws.bernoulli(0.25)),
        "bernoulli(1/10)": laws.standardize(laws.bernoulli(0.1)),
        "threepoint": laws.threepoint(math.sqrt(2), 0.25),
        "fourpoint": laws.parse_law([[-2, 0.1], [-0.5, 0.4], [1, 0.3], [1.5, 0.2]]),
    }
    rng = np.random.default_rng(2024)
    cases = []
    for name, law in law_pool.items():
        for n in (1, 2, 4, 8, 12):
            cases.append((name, "uniform", n, ar.uniform_theta(n), law))
            if n % 4 == 0:
                cases.append((name, "theta0", n, ar.theta_zero(n), law))
            else:
                cases.append((name, "random", n,
                              ar.CoefficientVector.normalized(rng.standard_normal(n)), law))
    return cases


def test_4_esseen_soundness(report):
    cases = esseen_matrix()
    failures = []
    for name, kind, n, theta, law in cases:
        exact = kolmogorov.exact_distance(theta, law).value
        bound, _ = fourier.esseen_bound_sweep(theta, law, (1, 2, 5, 10, 20, 40))
        if bound < exact - 1e-8:
            failures.append(f"{name}/{kind}/n={n}")
    report(4, "Esseen-bound soundness", len(cases) == 50 and not failures,
           f"{len(cases)} cases, {len(failures)} violations {failures}")


def test_5_dkw_calibration(report):
    theta = ar.theta_zero(8)
    exact = kolmogorov.exact_distance(theta, RAD).value
    misses = 0
    for seed in range(200):
        est = kolmogorov.mc_distance(theta, RAD, m=10**4, alpha=0.05, seed=seed)
        misses += abs(est.value - exact) > est.confidence_radius
    report(5, "DKW calibration", misses <= 20, f"{misses}/200 runs outside the radius (<= 20)")


def test_6_property_oracles(report, tmp_path):
    res = harness.run(harness.load_config({"scenario": "check-lemmas"}), tmp_path)
    failed = [m for m in res.messages if m.startswith("FAIL")]
    report(6, "property-oracle suites", res.code == 0,
           f"{len(res.messages)} checks, failed: {failed}")


def test_7_tail_shapes(report, tmp_path):
    cfg = harness.load_config({"scenario": "sphere-tails", "law": "bernoulli(0.25)", "n": [32],
                               "samples": 10**5, "expect": {"min_r_squared": 0.9}})
    res = harness.run(cfg, tmp_path)
    report(7, "tail shapes", res.code == 0, "; ".join(res.messages))


def test_8_tail_integral_decay(report):
    Y = laws.symmetrize(RAD)
    delta4 = laws.moments(RAD).delta4
    products = {}
    for n in (8, 16, 32, 64):
        theta = ar.theta_zero(n)
        R, _ = ar.minimal_certified_R(theta)
        T = n / (R * delta4)
        products[n] = T * ar.tail_integral_check(theta, Y, T)
    ratio = max(products.values()) / min(products.values())
    report(8, "tail integral T * value bounded", ratio <= 3,
           f"T*value {', '.join(f'n={n}: {p:.4f}' for n, p in products.items())}; "
           f"max/min = {ratio:.3f} (<= 3)")


def test_9_determinism(report, tmp_path):
    mismatched = []
    for scenario in harness.SCENARIOS:
        outs = []
        for threads in (1, 8):
            out = tmp_path / f"{scenario}-{threads}"
            proc = subprocess.run([sys.executable, "-m", "belab", scenario, "--out", str(out),
                                   "--threads", str(threads)], capture_output=True, text=True)
            outs.append((proc.returncode, {p.name: p.read_bytes() for p in out.iterdir()}))
        if outs[0] != outs[1] or not outs[0][1]:
            mismatched.append(scenario)
    report(9, "determinism across thread counts", not mismatched,
           f"{len(harness.SCENARIOS)} scenarios, mismatched: {mismatched}")
