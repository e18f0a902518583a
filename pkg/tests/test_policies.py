import itertools
import math

import numpy as np
import pytest

from nsbandit.envs import AR1Env, FixedPlusGPEnv, GPTwoType, realize, regret_of_sequence
from nsbandit.gaussian import GaussianBelief, kalman_diffuse, kalman_update
from nsbandit.policies import (
    OracleSpec,
    Policy,
    STSDistortionPolicy,
    STSDistortionSpec,
    STSFixedMeanPolicy,
    STSFixedMeanSpec,
    STSSwitchDPPolicy,
    STSSwitchDPSpec,
    SWTSPolicy,
    SWTSSpec,
    SWUCBPolicy,
    SWUCBSpec,
    TSExactGPPolicy,
    TSExactGPSpec,
    TSKalmanPolicy,
    TSKalmanSpec,
    UniformPolicy,
    UniformSpec,
    dp_best_sequence,
    policy_from_dict,
    policy_to_dict,
    sts_distortion_target,
    sw_ts_belief,
    sw_ucb_index,
    ts_exact_gp_posterior,
)
from nsbandit.processes import SEKernel

GP = GPTwoType(k=2, tau_cm=3.0, tau_id=8.0, noise_var=1.0)


def feed(policy, history):
    """Push an (arm, reward) history through the observe protocol."""
    for t, (a, r) in enumerate(history, start=1):
        policy.observe(t, a, r)
    return policy


class TestProtocol:
    def test_out_of_order_observe(self):
        p = UniformPolicy(2)
        p.observe(1, 0, 0.0)
        with pytest.raises(ValueError):
            p.observe(3, 0, 0.0)
        with pytest.raises(ValueError):
            p.observe(1, 0, 0.0)

    def test_act_does_not_advance(self):
        p = UniformPolicy(2)
        rng = np.random.default_rng(0)
        p.act(1, rng)
        p.act(1, rng)
        p.observe(1, 0, 0.0)
        p.act(2, rng)

    def test_arm_validation(self):
        p = UniformPolicy(2)
        with pytest.raises(ValueError):
            p.observe(1, 5, 0.0)


class TestUniform:
    def test_frequencies(self):
        p = UniformPolicy(2)
        rng = np.random.default_rng(1)
        draws = np.array([p.act(1, rng) for _ in range(100_000)])
        assert np.mean(draws == 0) == pytest.approx(0.5, abs=0.01)


class TestSlidingWindowEstimators:
    def test_empty_window(self):
        b = sw_ts_belief([], 0)
        assert (b.mean, b.variance) == (0.0, 1.0)

    def test_single_observation(self):
        b = sw_ts_belief([(0, 2.0)], 0)
        assert (b.mean, b.variance) == (1.0, 0.5)

    def test_many_identical(self):
        r = -0.7
        b = sw_ts_belief([(1, r)] * 99, 1)
        assert b.mean == pytest.approx(99 * r / 100)
        assert b.variance == pytest.approx(0.01)

    def test_ucb_untried_is_infinite(self):
        assert sw_ucb_index([(0, 1.0)], 1, 2.0) == math.inf

    def test_ucb_value(self):
        assert sw_ucb_index([(0, 1.0), (0, 1.0)], 0, 1.0) == pytest.approx(1.7071067811865475)

    def test_ucb_beta_zero_is_greedy(self):
        window = [(0, 1.0), (1, 3.0)]
        assert sw_ucb_index(window, 0, 0.0) == 1.0
        assert sw_ucb_index(window, 1, 0.0) == 3.0


class TestSlidingWindowPolicies:
    def test_policy_matches_estimator(self):
        p = feed(SWTSPolicy(2, L=3), [(0, 1.0), (1, -1.0), (0, 2.0), (1, 0.5)])
        window = list(p._window)
        assert len(window) == 3
        for a in range(2):
            b = sw_ts_belief(window, a)
            assert p._sums[a] / (1 + p._counts[a]) == pytest.approx(b.mean)

    def test_window_length_one(self):
        p = feed(SWTSPolicy(2, L=1), [(0, 5.0), (0, -2.0)])
        b = sw_ts_belief(list(p._window), 0)
        assert b.mean == pytest.approx(-1.0)
        assert sw_ts_belief(list(p._window), 1) == GaussianBelief(0.0, 1.0)

    def test_window_discipline(self):
        # two histories differing only before the last L records act identically
        tail = [(0, 0.4), (1, -0.2), (0, 1.1), (1, 0.9), (0, -0.6)]
        old_a = [(0, 9.0), (1, -9.0), (0, 3.0)]
        old_b = [(1, -4.0), (0, 7.0), (1, 2.0)]
        for cls, args in ((SWTSPolicy, (2, 5)), (SWUCBPolicy, (2, 5, 2.0))):
            p1 = feed(cls(*args), old_a + tail)
            p2 = feed(cls(*args), old_b + tail)
            r1, r2 = np.random.default_rng(42), np.random.default_rng(42)
            assert p1.act(9, r1) == p2.act(9, r2)

    def test_ucb_policy_matches_estimator(self):
        p = feed(SWUCBPolicy(3, L=4, beta=1.5), [(0, 1.0), (1, -1.0), (0, 2.0), (2, 0.5), (0, 0.1)])
        window = list(p._window)
        rng = np.random.default_rng(0)
        indices = [sw_ucb_index(window, a, 1.5) for a in range(3)]
        assert p.act(6, rng) == int(np.argmax(indices))

    def test_ucb_plays_untried_lowest_first(self):
        p = SWUCBPolicy(3, L=10, beta=2.0)
        rng = np.random.default_rng(0)
        assert p.act(1, rng) == 0
        p.observe(1, 0, 1.0)
        assert p.act(2, rng) == 1
        p.observe(2, 1, 0.0)
        assert p.act(3, rng) == 2

    def test_ucb_greedy_when_beta_zero(self):
        p = feed(SWUCBPolicy(2, L=10, beta=0.0), [(0, 1.0), (1, 3.0)])
        assert p.act(3, np.random.default_rng(0)) == 1


class TestTSKalman:
    def test_observe_is_diffuse_all_then_update_played(self):
        p = TSKalmanPolicy(3, alpha=0.9, sigma_xi_sq=0.19, sigma_w_sq=2.0)
        before = list(p.beliefs)
        p.observe(1, 1, 0.7)
        want = [kalman_diffuse(b, 0.9, 0.19) for b in before]
        want[1] = kalman_update(want[1], 0.7, 2.0)
        assert p.beliefs == want

    def test_degenerate_posterior_always_picks_certain_best(self):
        p = TSKalmanPolicy(2, alpha=0.5, sigma_xi_sq=0.0, sigma_w_sq=1.0)
        p.beliefs = [GaussianBelief(0.0, 0.0), GaussianBelief(1.0, 0.0)]
        # alpha scaling keeps arm 1 ahead after the act-time diffusion
        rng = np.random.default_rng(0)
        assert all(p.act(1, rng) == 1 for _ in range(50))

    def test_rejects_alpha_one(self):
        with pytest.raises(ValueError):
            TSKalmanPolicy(2, alpha=1.0, sigma_xi_sq=0.1, sigma_w_sq=1.0)


def direct_gp_posterior(params, history, t):
    """Direct-inverse posterior oracle for the common-plus-idiosyncratic model."""
    id_k = SEKernel(1.0, params.tau_id)
    cm_k = SEKernel(1.0, params.tau_cm)
    actions = np.array([a for a, _ in history])
    rewards = np.array([r for _, r in history])
    n = actions.size
    times = np.arange(1, n + 1, dtype=float)
    lag = times[:, None] - times[None, :]
    s_rr = cm_k.lag_cov(lag) + (actions[:, None] == actions[None, :]) * id_k.lag_cov(lag)
    s_rr += params.noise_var * np.eye(n)
    s_tr = (np.arange(params.k)[:, None] == actions[None, :]) * id_k.lag_cov(t - times)[None, :]
    inv = np.linalg.inv(s_rr)
    mean = s_tr @ inv @ rewards
    cov = np.eye(params.k) - s_tr @ inv @ s_tr.T
    return mean, cov


HIST = [(0, 0.9), (1, -0.4), (0, 1.2), (1, 0.1), (0, 0.5)]


class TestTSExactGP:
    def test_empty_history_prior(self):
        p = TSExactGPPolicy.from_gp_params(GP, horizon=10)
        post = p.posterior(1)
        assert np.array_equal(post.mean, np.zeros(2))
        assert np.array_equal(post.cov, np.eye(2))

    def test_symmetric_prior_first_action(self):
        p = TSExactGPPolicy.from_gp_params(GP, horizon=4)
        rng = np.random.default_rng(3)
        draws = np.array([p.act(1, rng) for _ in range(20_000)])
        assert np.mean(draws == 0) == pytest.approx(0.5, abs=0.02)

    def test_incremental_matches_batch_op(self):
        p = feed(TSExactGPPolicy.from_gp_params(GP, horizon=10), HIST)
        t = len(HIST) + 1
        inc = p.posterior(t)
        batch = ts_exact_gp_posterior(GP, HIST, t)
        assert np.allclose(inc.mean, batch.mean, atol=1e-10)
        assert np.allclose(inc.cov, batch.cov, atol=1e-10)

    def test_batch_op_matches_direct_inverse_oracle(self):
        rng = np.random.default_rng(5)
        for n in (1, 4, 9):
            hist = [(int(rng.integers(2)), float(rng.standard_normal())) for _ in range(n)]
            t = n + 1
            got = ts_exact_gp_posterior(GP, hist, t)
            mean, cov = direct_gp_posterior(GP, hist, t)
            assert np.allclose(got.mean, mean, atol=1e-9)
            assert np.allclose(got.cov, cov, atol=1e-9)

    def test_buffer_growth_preserves_posterior(self):
        rng = np.random.default_rng(6)
        hist = [(int(rng.integers(2)), float(rng.standard_normal())) for _ in range(300)]
        p = TSExactGPPolicy.from_gp_params(GP)  # default capacity 256 forces growth
        feed(p, hist)
        inc = p.posterior(301)
        mean, cov = direct_gp_posterior(GP, hist, 301)
        assert np.allclose(inc.mean, mean, atol=1e-8)
        assert np.allclose(inc.cov, cov, atol=1e-8)

    def test_kalman_equals_exact_on_ar1_kernel(self):
        alpha, xi, w = 0.8, 0.36, 1.0
        v = xi / (1 - alpha * alpha)
        exact = TSExactGPPolicy(
            2, id_lag=lambda d: v * alpha ** np.abs(d), cm_lag=None, noise_var=w, horizon=160
        )
        kal = TSKalmanPolicy(2, alpha, xi, w)
        rng = np.random.default_rng(7)
        for t in range(1, 151):
            post = exact.posterior(t)
            for a in range(2):
                d = kalman_diffuse(kal.beliefs[a], alpha, xi)
                assert post.mean[a] == pytest.approx(d.mean, abs=1e-8)
                assert post.cov[a, a] == pytest.approx(d.variance, abs=1e-8)
            arm = int(rng.integers(2))
            reward = float(rng.standard_normal() * 1.5)
            exact.observe(t, arm, reward)
            kal.observe(t, arm, reward)

    def test_probability_matching(self):
        # empirical action law of act() matches the posterior argmax law
        p = feed(TSExactGPPolicy.from_gp_params(GP, horizon=10), HIST)
        t = len(HIST) + 1
        rng = np.random.default_rng(8)
        n_act = 100_000
        acts = np.array([p.act(t, rng) for _ in range(n_act)])
        emp = np.bincount(acts, minlength=2) / n_act

        mean, cov = direct_gp_posterior(GP, HIST, t)
        oracle_rng = np.random.default_rng(9)
        samples = oracle_rng.multivariate_normal(mean, cov, size=1_000_000)
        oracle = np.bincount(np.argmax(samples, axis=1), minlength=2) / 1_000_000
        assert 0.5 * np.abs(emp - oracle).sum() < 0.02


class TestDPBestSequence:
    def test_unconstrained_is_pointwise_argmax(self):
        rng = np.random.default_rng(0)
        mu = rng.standard_normal((12, 3))
        seq = dp_best_sequence(mu, m=12)
        assert np.array_equal(seq, np.argmax(mu, axis=1))

    def test_budget_one_is_best_constant(self):
        rng = np.random.default_rng(1)
        mu = rng.standard_normal((15, 4))
        seq = dp_best_sequence(mu, m=1)
        assert np.all(seq == seq[0])
        assert seq[0] == np.argmax(mu.sum(axis=0))

    @staticmethod
    def brute_force(mu, m):
        t_len, k = mu.shape
        best_seq, best_key = None, None
        for seq in itertools.product(range(k), repeat=t_len):
            switches = 1 + sum(seq[i] != seq[i - 1] for i in range(1, t_len))
            if switches > m:
                continue
            value = sum(mu[t, seq[t]] for t in range(t_len))
            key = (value, -switches)
            if best_key is None or key > best_key:
                best_seq, best_key = seq, key
        return np.array(best_seq), best_key[0]

    def test_matches_enumeration(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            t_len = int(rng.integers(2, 9))
            k = int(rng.integers(2, 4))
            m = int(rng.integers(1, 4))
            # dyadic values keep float sums exact, so ties are real and exercised
            mu = rng.integers(0, 16, size=(t_len, k)) / 8.0
            want_seq, want_val = self.brute_force(mu, m)
            got = dp_best_sequence(mu, m)
            got_val = mu[np.arange(t_len), got].sum()
            assert got_val == want_val
            assert np.array_equal(got, want_seq)

    def test_beats_random_feasible_sequences(self):
        rng = np.random.default_rng(3)
        mu = rng.standard_normal((40, 3))
        m = 4
        seq = dp_best_sequence(mu, m)
        best = mu[np.arange(40), seq].sum()
        for _ in range(1000):
            cand = np.empty(40, dtype=int)
            cuts = np.sort(rng.integers(1, 40, size=m - 1))
            arms = rng.integers(0, 3, size=m)
            bounds = [0] + list(cuts) + [40]
            for j in range(m):
                cand[bounds[j] : bounds[j + 1]] = arms[j]
            assert mu[np.arange(40), cand].sum() <= best + 1e-9

    def test_selection_invariant_to_common_shift(self):
        rng = np.random.default_rng(4)
        mu = rng.standard_normal((10, 3))
        shift = rng.standard_normal((10, 1))
        assert np.array_equal(dp_best_sequence(mu, 3), dp_best_sequence(mu + shift, 3))

    def test_rejects_bad_budget(self):
        with pytest.raises(ValueError):
            dp_best_sequence(np.zeros((3, 2)), 0)


class TestSTSDistortionTarget:
    def test_zero_distortion_tracks_argmax(self):
        rng = np.random.default_rng(0)
        mu = rng.standard_normal((30, 3))
        assert np.array_equal(sts_distortion_target(mu, 0.0), np.argmax(mu, axis=1))

    def test_equality_keeps_incumbent(self):
        mu = np.array([[1.0, 0.0], [1.0, 1.0]])
        assert np.array_equal(sts_distortion_target(mu, 0.0), [0, 0])

    def test_infinite_distortion_never_switches(self):
        rng = np.random.default_rng(1)
        mu = rng.standard_normal((30, 3))
        target = sts_distortion_target(mu, math.inf)
        assert np.all(target == target[0])

    def test_hand_trace(self):
        mu = np.array([[1.0, 0.0], [0.5, 0.9], [0.0, 1.0]])
        assert np.array_equal(sts_distortion_target(mu, 0.5), [0, 0, 1])

    def test_regret_guarantee_and_selection_shift_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            path = realize(GPTwoType(k=2, tau_cm=5.0, tau_id=10.0), 200, rng)
            for dist in (0.1, 0.5):
                target = sts_distortion_target(path.mu, dist)
                assert regret_of_sequence(path, target) <= dist
            shift = rng.standard_normal((200, 1))
            assert np.array_equal(
                sts_distortion_target(path.mu, 0.3), sts_distortion_target(path.mu + shift, 0.3)
            )


class TestSTSPolicies:
    def test_distortion_policy_plays_target_of_sample(self):
        p = STSDistortionPolicy.from_gp_params(GP, D=0.4)
        rng = np.random.default_rng(0)
        grid = np.random.default_rng(1).standard_normal((6, 2))
        p._sampler.sample_grid = lambda t_max, rng: grid[:t_max]
        for t in range(1, 7):
            want = sts_distortion_target(grid[:t], 0.4)[t - 1]
            assert p.act(t, rng) == want
            p.observe(t, 0, 0.0)

    def test_distortion_zero_certain_state_plays_argmax(self):
        p = STSDistortionPolicy.from_gp_params(GP, D=0.0)
        grid = np.array([[1.0, 0.0], [0.2, 0.7], [0.5, -0.5]])
        p._sampler.sample_grid = lambda t_max, rng: grid[:t_max]
        rng = np.random.default_rng(2)
        for t in range(1, 4):
            assert p.act(t, rng) == int(np.argmax(grid[t - 1]))
            p.observe(t, 0, 0.0)

    def test_switch_dp_budget_one_plays_best_fixed_arm(self):
        p = STSSwitchDPPolicy.from_gp_params(GP, m=1, horizon=5)
        grid = np.array([[0.0, 1.0], [0.0, 0.5], [2.0, 0.0], [0.0, 0.5], [0.0, 0.5]])
        p._sampler.sample_grid = lambda t_max, rng: grid[:t_max]
        rng = np.random.default_rng(3)
        best_fixed = int(np.argmax(grid.sum(axis=0)))
        for t in range(1, 6):
            assert p.act(t, rng) == best_fixed
            p.observe(t, 0, 0.0)

    def test_switch_dp_respects_horizon(self):
        p = STSSwitchDPPolicy.from_gp_params(GP, m=2, horizon=3)
        rng = np.random.default_rng(4)
        for t in range(1, 4):
            p.act(t, rng)
            p.observe(t, 0, 0.0)
        with pytest.raises(ValueError):
            p.act(4, rng)

    def test_sampler_posterior_consistent_with_exact_policy(self):
        # marginal of the prefix sampler at the current period matches the
        # exact-posterior policy's belief over current idiosyncratic levels
        policy = feed(TSExactGPPolicy.from_gp_params(GP, horizon=10), HIST)
        sts = STSDistortionPolicy.from_gp_params(GP, D=0.1)
        feed(sts, HIST)
        t = len(HIST) + 1
        rng = np.random.default_rng(5)
        draws = np.stack([sts._sampler.sample_grid(t, rng)[t - 1] for _ in range(4000)])
        post = policy.posterior(t)
        assert np.allclose(draws.mean(axis=0), post.mean, atol=0.08)
        assert np.allclose(np.cov(draws.T), post.cov, atol=0.08)

    def test_sts_policies_run_end_to_end(self):
        env = GPTwoType(k=2, tau_cm=4.0, tau_id=6.0, noise_var=1.0)
        rng = np.random.default_rng(6)
        path = realize(env, 12, rng)
        for spec in (STSDistortionSpec(D=0.5), STSSwitchDPSpec(m=3)):
            policy = spec.build(env, 12)
            prng = np.random.default_rng(7)
            for t in range(1, 13):
                a = policy.act(t, prng)
                assert 0 <= a < 2
                policy.observe(t, a, float(path.mu[t - 1, a] + prng.standard_normal()))


class TestSTSFixedMean:
    def test_posterior_against_direct_formula(self):
        p = STSFixedMeanPolicy(2, v_sq=2.0, tau=5.0, noise_var=1.5)
        history = [(0, 1.0), (1, -0.5), (0, 0.8), (0, 1.4)]
        feed(p, history)
        kern = SEKernel(1.0, 5.0)
        for arm in range(2):
            times = np.array([t for t, (a, _) in enumerate(history, 1) if a == arm], dtype=float)
            ys = np.array([r for a, r in history if a == arm])
            cov = kern.lag_cov(times[:, None] - times[None, :]) + 1.5 * np.eye(times.size)
            inv = np.linalg.inv(cov)
            ones = np.ones(times.size)
            prec = 1 / 2.0 + ones @ inv @ ones
            post = p.fixed_mean_posterior(arm)
            assert post.mean == pytest.approx(float(ones @ inv @ ys) / prec, abs=1e-10)
            assert post.variance == pytest.approx(1 / prec, abs=1e-10)

    def test_empty_arm_has_prior(self):
        p = STSFixedMeanPolicy(2, v_sq=2.0, tau=5.0, noise_var=1.0)
        assert p.fixed_mean_posterior(0) == GaussianBelief(0.0, 2.0)

    def test_selection_entropy_falls_while_plain_ts_stays_noisy(self):
        # fast disturbances: the fixed-mean learner settles, the exact-posterior
        # learner keeps chasing the white-noise component
        env = FixedPlusGPEnv(k=2, v_sq=1.0, tau=0.01, noise_var=1.0)
        t_len, runs = 120, 60
        sts_choices = np.empty((runs, t_len), dtype=int)
        ts_choices = np.empty((runs, t_len), dtype=int)
        for run in range(runs):
            rng = np.random.default_rng(100 + run)
            path = realize(env, t_len, rng)
            sts = STSFixedMeanPolicy(2, v_sq=1.0, tau=0.01, noise_var=1.0)
            gp_lag = SEKernel(1.0, 0.01).lag_cov
            ts = TSExactGPPolicy(
                2, id_lag=lambda d: 1.0 + gp_lag(d), cm_lag=None, noise_var=1.0, horizon=t_len
            )
            for policy, choices in ((sts, sts_choices), (ts, ts_choices)):
                prng = np.random.default_rng(1000 + run)
                for t in range(1, t_len + 1):
                    a = policy.act(t, prng)
                    choices[run, t - 1] = a
                    policy.observe(t, a, float(path.mu[t - 1, a] + prng.standard_normal()))

        def window_entropy(choices, lo, hi):
            # selection entropy conditional on each run's environment, averaged
            ents = []
            for run_choices in choices:
                freq = run_choices[lo:hi].mean()
                if freq in (0.0, 1.0):
                    ents.append(0.0)
                else:
                    ents.append(-(freq * math.log(freq) + (1 - freq) * math.log(1 - freq)))
            return float(np.mean(ents))

        sts_early = window_entropy(sts_choices, 0, 10)
        sts_late = window_entropy(sts_choices, t_len - 20, t_len)
        ts_late = window_entropy(ts_choices, t_len - 20, t_len)
        assert sts_late < 0.5 * sts_early
        assert sts_late < ts_late


class TestPolicySpecs:
    SPECS = [
        UniformSpec(),
        OracleSpec(),
        SWTSSpec(L=50),
        SWUCBSpec(L=50, beta=2.0),
        TSKalmanSpec(alpha=0.9, sigma_xi_sq=0.19, sigma_w_sq=1.0),
        TSExactGPSpec(),
        STSDistortionSpec(D=0.5),
        STSSwitchDPSpec(m=5),
        STSFixedMeanSpec(v_sq=1.0, tau=10.0, noise_var=1.0),
    ]

    def test_policy_ids(self):
        ids = [s.policy_id for s in self.SPECS]
        assert ids == [
            "uniform",
            "oracle",
            "sw_ts_L50",
            "sw_ucb_L50_b2",
            "ts_kalman",
            "ts_exact",
            "sts_D0.5",
            "sts_m5",
            "sts_fixed",
        ]

    def test_dict_round_trip(self):
        for spec in self.SPECS + [STSDistortionSpec(D=0.1, params=GP)]:
            assert policy_from_dict(policy_to_dict(spec)) == spec

    def test_build_produces_matching_ids(self):
        for spec in self.SPECS:
            policy = spec.build(GP, 20)
            assert policy.policy_id == spec.policy_id
            assert isinstance(policy, Policy)

    def test_kalman_inherits_from_ar1_env(self):
        env = AR1Env(k=3, alpha=0.7, sigma_xi_sq=0.51, sigma_w_sq=2.0)
        p = TSKalmanSpec().build(env, 10)
        assert (p.alpha, p.sigma_xi_sq, p.sigma_w_sq) == (0.7, 0.51, 2.0)
        with pytest.raises(ValueError):
            TSKalmanSpec().build(GP, 10)

    def test_exact_requires_gp_knowledge(self):
        env = AR1Env(k=2, alpha=0.5, sigma_xi_sq=0.75, sigma_w_sq=1.0)
        with pytest.raises(ValueError):
            TSExactGPSpec().build(env, 10)
        built = TSExactGPSpec(params=GP).build(env, 10)
        assert built.k == 2

    def test_fixed_mean_inherits_env(self):
        env = FixedPlusGPEnv(k=2, v_sq=3.0, tau=7.0, noise_var=0.5)
        p = STSFixedMeanSpec().build(env, 10)
        assert p.v_sq == 3.0
        with pytest.raises(ValueError):
            STSFixedMeanSpec().build(GP, 10)

    def test_from_dict_errors(self):
        with pytest.raises(ValueError):
            policy_from_dict({"type": "nope"})
        with pytest.raises(ValueError):
            policy_from_dict({"type": "sw_ts"})
