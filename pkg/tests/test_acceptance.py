"""Acceptance suite: every numbered criterion in one test, printed pass/fail.

Run with `pytest tests/test_acceptance.py -s` to see one line per criterion.
The exact-posterior Thompson-sampling experiments (criteria 3 and 4) dominate
the runtime (several minutes); they share one session-scoped set of runs.
"""
import contextlib
import itertools
import math
import time

import numpy as np
import pytest

from nsbandit.envs import GPTwoType, RenewalLBEnv, realize, regret_of_sequence
from nsbandit.gaussian import condition
from nsbandit.harness import (
    ExperimentConfig,
    _aux_rng,
    estimate_tau_eff,
    run_experiment,
)
from nsbandit.infometrics import (
    combinatorial_entropy_bound,
    effective_horizon_bound,
    entropy_rate_bruteforce,
    entropy_rate_markov_switch,
    entropy_rate_plugin,
    markov_switch_expected_switch_rate,
    markov_switch_path_law,
    rate_distortion_bound,
    regret_bound_karmed,
    regret_bound_variation,
    rice_effective_horizon,
)
from nsbandit.policies import TSExactGPSpec, TSKalmanPolicy, UniformSpec, dp_best_sequence, sts_distortion_target
from nsbandit.processes import RenewalSpec, sample_markov_switch_path, MarkovSwitchSpec
from nsbandit import cli

MASTER_SEED = 20260810


@contextlib.contextmanager
def criterion(num, text):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {num:02d} FAIL: {text}")
        raise
    print(f"ACCEPTANCE {num:02d} PASS: {text}")


@pytest.fixture(scope="session")
def exact_ts_runs():
    """Exact-posterior TS regret on the four (tau_id, tau_cm) acceptance configs."""
    results = {}
    for tau_id, tau_cm in ((50.0, 10.0), (50.0, 100.0), (10.0, 10.0), (100.0, 10.0)):
        cfg = ExperimentConfig(
            env=GPTwoType(k=2, tau_cm=tau_cm, tau_id=tau_id, noise_var=1.0),
            policies=(TSExactGPSpec(),),
            T=1000,
            S=300,
            master_seed=MASTER_SEED,
        )
        results[(tau_id, tau_cm)] = run_experiment(cfg, threads=2)[0]
    return results


def test_criterion_01_uniform_regret_and_runtime():
    with criterion(1, "uniform-policy regret matches the folded-normal constant"):
        cfg = ExperimentConfig(
            env=GPTwoType(k=2, tau_cm=10.0, tau_id=50.0, noise_var=1.0),
            policies=(UniformSpec(),),
            T=1000,
            S=1000,
            master_seed=MASTER_SEED,
        )
        start = time.time()
        est = run_experiment(cfg, threads=1)[0]
        elapsed = time.time() - start
        assert 0.544 <= est.mean <= 0.584, est.mean
        # analytic oracle: expected shortfall of a coin flip between two arms
        # whose gap is N(0, 2): E|gap|/2 = 1/sqrt(pi)
        assert abs(est.mean - 1.0 / math.sqrt(math.pi)) < 4 * est.stderr
        assert elapsed < 120.0, f"single-threaded runtime {elapsed:.1f}s"


def test_criterion_02_tau_eff_matches_zero_crossing_formula():
    with criterion(2, "estimated effective horizon tracks the zero-crossing formula"):
        for i, tau_id in enumerate((10.0, 25.0, 50.0)):
            env = GPTwoType(k=2, tau_cm=10.0, tau_id=tau_id, noise_var=1.0)
            est = estimate_tau_eff(env, 1000, 100, _aux_rng(MASTER_SEED, 10, i))
            want = rice_effective_horizon(tau_id)
            assert not est.censored
            assert abs(est.value - want) / want < 0.10, (tau_id, est.value, want)


def test_criterion_03_common_variation_insensitivity(exact_ts_runs):
    with criterion(3, "exact-TS regret insensitive to the common timescale and below the bound"):
        a = exact_ts_runs[(50.0, 10.0)].mean
        b = exact_ts_runs[(50.0, 100.0)].mean
        assert abs(a - b) / min(a, b) < 0.15, (a, b)
        h_rate = effective_horizon_bound(math.pi * 50, 0.0, math.log(2), 1000)
        bound = regret_bound_karmed(1.0, 2, h_rate)
        assert a < bound and b < bound, (a, b, bound)


def test_criterion_04_regret_decreases_in_idiosyncratic_timescale(exact_ts_runs):
    with criterion(4, "exact-TS regret strictly decreases across tau_id at fixed tau_cm"):
        runs = [exact_ts_runs[(tau, 10.0)] for tau in (10.0, 50.0, 100.0)]
        for faster, slower in zip(runs, runs[1:]):
            gap = faster.mean - slower.mean
            assert gap > 2 * (faster.stderr + slower.stderr), (faster, slower)


def test_criterion_05_kalman_matches_batch_conditioning():
    with criterion(5, "Kalman recursion equals batch conditioning on random AR(1) histories"):
        rng = np.random.default_rng(MASTER_SEED)
        for _ in range(100):
            alpha = float(rng.uniform(0.1, 0.95))
            sigma_xi_sq = float(rng.uniform(0.05, 1.5))
            sigma_w_sq = float(rng.uniform(0.3, 2.0))
            k = int(rng.integers(2, 4))
            t_len = int(rng.integers(3, 201))
            policy = TSKalmanPolicy(k, alpha, sigma_xi_sq, sigma_w_sq)
            times = {a: [] for a in range(k)}
            rewards = {a: [] for a in range(k)}
            for t in range(1, t_len + 1):
                a = int(rng.integers(k))
                r = float(2.0 * rng.standard_normal())
                policy.observe(t, a, r)
                times[a].append(t)
                rewards[a].append(r)
            v = sigma_xi_sq / (1 - alpha * alpha)
            for a in range(k):
                ts = np.asarray(times[a], dtype=float)
                n = ts.size
                if n == 0:
                    continue
                joint = np.empty((n + 1, n + 1))
                lag = np.abs(ts[:, None] - ts[None, :])
                joint[:n, :n] = v * alpha**lag + sigma_w_sq * np.eye(n)
                cross = v * alpha ** np.abs(t_len - ts)
                joint[:n, n] = cross
                joint[n, :n] = cross
                joint[n, n] = v
                post = condition(np.zeros(n + 1), joint, np.arange(n), rewards[a])
                assert abs(policy.beliefs[a].mean - post.mean[0]) < 1e-8
                assert abs(policy.beliefs[a].variance - post.cov[0, 0]) < 1e-8


def test_criterion_06_entropy_estimators():
    with criterion(6, "plug-in entropy within 5% of closed form; brute force exact"):
        spec = MarkovSwitchSpec(10, 0.1)
        rng = _aux_rng(MASTER_SEED, 11)
        paths = np.stack([sample_markov_switch_path(spec, 100_000, rng) for _ in range(10)])
        est = entropy_rate_plugin(paths, order=1)
        closed = entropy_rate_markov_switch(10, 0.1)
        assert closed == pytest.approx(0.54481, abs=5e-6)
        assert abs(est.value - closed) / closed < 0.05, est
        law = markov_switch_path_law(2, 0.3, 10)
        hb = 0.3 * math.log(1 / 0.3) + 0.7 * math.log(1 / 0.7)
        want = (math.log(2) + 9 * hb) / 10
        assert abs(entropy_rate_bruteforce(law, 10) - want) < 1e-9


def test_criterion_07_entropy_bound_dominance_and_tightness():
    with criterion(7, "switch-rate bound dominates brute force; horizon bound near-tight"):
        for k in (2, 3):
            for t_len in range(2, 13):
                for delta in (0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0):
                    law = markov_switch_path_law(k, delta, t_len)
                    brute = entropy_rate_bruteforce(law, t_len)
                    s_bar = markov_switch_expected_switch_rate(k, delta, t_len)
                    bound = combinatorial_entropy_bound(s_bar, t_len, k)
                    assert bound >= brute - 1e-12, (k, t_len, delta)
        for k in (2, 3, 10):
            for delta in (0.01, 0.02, 0.05):
                bound = effective_horizon_bound(1 / delta, math.log(k - 1), 0.0, math.inf)
                closed = entropy_rate_markov_switch(k, delta)
                assert abs(bound - closed) / closed < 0.01, (k, delta)


def brute_force_dp(mu, m):
    t_len, k = mu.shape
    best_seq, best_key = None, None
    for seq in itertools.product(range(k), repeat=t_len):
        switches = 1 + sum(seq[i] != seq[i - 1] for i in range(1, t_len))
        if switches > m:
            continue
        key = (sum(mu[t, seq[t]] for t in range(t_len)), -switches)
        if best_key is None or key > best_key:
            best_seq, best_key = seq, key
    return np.asarray(best_seq), best_key[0]


def test_criterion_08_dp_equals_enumeration():
    with criterion(8, "switch-budget DP equals exhaustive enumeration with tie-breaks"):
        rng = np.random.default_rng(MASTER_SEED + 8)
        for _ in range(200):
            t_len = int(rng.integers(2, 9))
            k = int(rng.integers(2, 4))
            m = int(rng.integers(1, 4))
            mu = rng.integers(0, 16, size=(t_len, k)) / 8.0  # dyadic: exact float sums
            want_seq, want_val = brute_force_dp(mu, m)
            got = dp_best_sequence(mu, m)
            assert mu[np.arange(t_len), got].sum() == want_val
            assert np.array_equal(got, want_seq), (mu, m, got, want_seq)


def test_criterion_09_distortion_target_guarantee():
    with criterion(9, "distortion benchmark stays within D and switches less as D grows"):
        rng = np.random.default_rng(MASTER_SEED + 9)
        env = GPTwoType(k=2, tau_cm=10.0, tau_id=10.0, noise_var=1.0)
        for _ in range(100):
            path = realize(env, 300, rng)
            switch_counts = []
            for dist in (0.1, 0.5):
                target = sts_distortion_target(path.mu, dist)
                assert regret_of_sequence(path, target) <= dist
                switch_counts.append(1 + int(np.count_nonzero(target[1:] != target[:-1])))
            assert switch_counts[1] <= switch_counts[0]


def test_criterion_10_renewal_switch_probability():
    with criterion(10, "renewal construction hits its target switch probability"):
        for i, (k, tau_eff) in enumerate(((2, 4.0), (4, 16.0))):
            env = RenewalLBEnv(spec=RenewalSpec(k=k, tau_eff=tau_eff))
            opt = realize(env, 100_000, _aux_rng(MASTER_SEED, 12, i)).opt
            freq = float(np.mean(opt[1:] != opt[:-1]))
            assert abs(freq - 1.0 / tau_eff) / (1.0 / tau_eff) < 0.05, (k, tau_eff, freq)


def test_criterion_11_bound_formula_regression():
    with criterion(11, "drift bound formulas reproduce hand-evaluated values, monotone"):
        assert rate_distortion_bound(0.0, 0.5, 100, 2) == pytest.approx(
            0.15894952099644110, rel=1e-12
        )
        assert rate_distortion_bound(0.0, 0.5, 100, 2) == pytest.approx(0.15896, rel=1e-4)
        assert rate_distortion_bound(0.01, 0.2, 1000, 2) == pytest.approx(
            0.43190695271445783, rel=1e-12
        )
        assert rate_distortion_bound(0.01, 0.2, 1000, 2) == pytest.approx(0.43191, rel=1e-4)
        # exact arithmetic for the documented example (its printed rounding is
        # off by ~1e-3; see the variation-bound example note in the README)
        assert regret_bound_variation(4.0, 0.01, 2, 1000) == pytest.approx(
            3.1098472022733974, rel=1e-4
        )
        assert regret_bound_variation(4.0, 0.0, 2, 1000) == pytest.approx(
            math.sqrt(3 * 4.0 * math.log(2000) / 1000), rel=1e-12
        )
        d_vals = [rate_distortion_bound(0.02, d, 500, 3) for d in np.linspace(0.05, 2.0, 40)]
        assert all(x > y for x, y in zip(d_vals, d_vals[1:]))
        v_vals = [rate_distortion_bound(v, 0.3, 500, 3) for v in np.linspace(0.0, 0.5, 40)]
        assert all(x < y for x, y in zip(v_vals, v_vals[1:]))
        g_vals = [regret_bound_variation(4.0, v, 2, 1000) for v in np.linspace(0.0, 0.2, 40)]
        assert all(x < y for x, y in zip(g_vals, g_vals[1:]))


def test_criterion_12_thread_count_determinism(tmp_path):
    with criterion(12, "run output is byte-identical across thread counts"):
        import json

        cfg = {
            "env": {"type": "gp_two_type", "k": 2, "tau_cm": 5.0, "tau_id": 15.0, "noise_var": 1.0},
            "policies": [
                {"type": "uniform"},
                {"type": "sw_ts", "L": 10},
                {"type": "ts_exact"},
            ],
            "T": 30,
            "S": 6,
            "master_seed": MASTER_SEED,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        blobs = []
        for name, threads in (("t1.csv", "1"), ("t2.csv", "2"), ("t1b.csv", "1")):
            out = tmp_path / name
            code = cli.main(
                ["run", "--config", str(cfg_path), "--out", str(out), "--threads", threads]
            )
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1] == blobs[2]
