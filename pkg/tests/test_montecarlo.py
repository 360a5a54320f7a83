import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mzabsorber.errors import ConfigError
from mzabsorber.models import Model, ScenarioConfig, reference_probability
from mzabsorber.montecarlo import (
    RNG_NAME,
    TrialSummary,
    draws_per_trial,
    merge,
    run_range,
    run_trials,
)


def config_for(model, wa=0.5):
    theta = 0.9 if model is Model.COHERENT_FIXED_PHASE else None
    return ScenarioConfig(model, wa, 1 - wa, fixed_theta=theta)


ALL = [config_for(m) for m in Model]


@pytest.mark.parametrize("config", ALL, ids=lambda c: c.model.value)
def test_deterministic(config):
    a = run_trials(config, 20_000, 7)
    b = run_trials(config, 20_000, 7)
    assert a == b
    assert a.rng == RNG_NAME


@pytest.mark.parametrize("config", ALL, ids=lambda c: c.model.value)
def test_outcomes_complete(config):
    s = run_trials(config, 5_000, 3)
    assert s.clicks_d + s.clicks_c + s.absorbed == s.n_trials == 5_000
    assert s.estimate_d == s.clicks_d / 5_000
    assert s.std_err_d == pytest.approx(np.sqrt(s.estimate_d * (1 - s.estimate_d) / 5_000))


def test_different_seeds_differ():
    c = config_for(Model.ENTANGLED_RANDOM_PHASE)
    assert run_trials(c, 10_000, 1) != run_trials(c, 10_000, 2)


def test_open_device_never_clicks():
    c = ScenarioConfig(Model.COLLAPSED_MIXTURE, 1.0, 0.0)
    for n in (1, 17, 100_000):
        assert run_trials(c, n, 11).clicks_d == 0


def test_blocked_branch_only():
    c = ScenarioConfig(Model.COLLAPSED_MIXTURE, 0.0, 1.0)
    s = run_trials(c, 200_000, 5)
    assert abs(s.estimate_d - 0.25) < 4 * s.std_err_d


@pytest.mark.parametrize("n", [0, -3])
def test_rejects_bad_trial_counts(n):
    with pytest.raises(ConfigError):
        run_trials(ALL[0], n, 1)


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5])
def test_rejects_bad_seeds(seed):
    with pytest.raises(ConfigError):
        run_trials(ALL[0], 10, seed)


@pytest.mark.parametrize("config", ALL, ids=lambda c: c.model.value)
@pytest.mark.parametrize("workers", [2, 3, 8])
def test_worker_count_does_not_change_counts(config, workers):
    assert run_trials(config, 30_001, 99, workers=workers) == run_trials(config, 30_001, 99)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3000), st.integers(1, 3000), st.sampled_from(list(Model)))
def test_split_ranges_merge_to_full_run(m, k, model):
    c = config_for(model)
    full = run_range(c, 0, m + k, 123)
    assert merge(run_range(c, 0, m, 123), run_range(c, m, k, 123)) == full


def _summary(d, c, a, seed=1, model=ALL[0]):
    return TrialSummary(d + c + a, d, c, a, seed, model)


counts = st.tuples(st.integers(0, 50), st.integers(0, 50), st.integers(1, 50))


@given(counts, counts, counts)
def test_merge_associative_commutative(pa, pb, pc):
    a, b, c = (_summary(*p) for p in (pa, pb, pc))
    assert merge(a, merge(b, c)) == merge(merge(a, b), c)
    assert merge(a, b) == merge(b, a)
    assert merge(a, b).n_trials == a.n_trials + b.n_trials


def test_merge_mixed_seeds_drops_seed():
    assert merge(_summary(1, 1, 1, seed=1), _summary(1, 1, 1, seed=2)).seed is None


def test_merge_model_mismatch():
    with pytest.raises(ConfigError):
        merge(_summary(1, 1, 1), _summary(1, 1, 1, model=ALL[1]))


def test_summary_invariants():
    with pytest.raises(ValueError):
        TrialSummary(10, 3, 3, 3, 1, ALL[0])
    with pytest.raises(ConfigError):
        TrialSummary(0, 0, 0, 0, 1, ALL[0])


def test_summary_round_trip():
    s = run_trials(ALL[3], 1000, 8)
    assert TrialSummary.from_dict(s.to_dict()) == s


def test_draws_per_trial():
    assert draws_per_trial(Model.COLLAPSED_MIXTURE) == 2
    assert draws_per_trial(Model.COHERENT_FIXED_PHASE) == 1
    assert draws_per_trial(Model.RANDOM_LOWER_PHASE) == 3


@pytest.mark.parametrize("config", ALL + [config_for(Model.ENTANGLED_RANDOM_PHASE, 0.2)], ids=str)
def test_convergence_over_seeds(config):
    """|estimate - analytic| < 4 standard errors for at least 99 of 100 seeds."""
    ref = reference_probability(config)
    ok = 0
    for seed in range(100):
        s = run_trials(config, 100_000, 10_000 + seed)
        ok += abs(s.estimate_d - ref) < 4 * s.std_err_d
    assert ok >= 99
