import numpy as np
import pytest

from eoqsim.encoding import frame_for
from eoqsim.lattice import GridSpec, QubitAssignment, Tqd, PERM_12_3
from eoqsim.rb import (
    RBConfig,
    RBNoise,
    RBRawData,
    fit_rb,
    pool_results,
    run_rb,
    validate_rb_oracle,
)

GRID = GridSpec(2, 3)
FRAME = frame_for(GRID, QubitAssignment(Tqd(((0, 0), (0, 1), (0, 2))), PERM_12_3))
SPAM = ((0, 1), (0, 2))


def _cfg(**kw):
    base = dict(
        grid=GRID,
        frame=FRAME,
        spam_pair=SPAM,
        lengths=(2, 4, 8),
        n_sequences=3,
        shots=2,
    )
    base.update(kw)
    return RBConfig(**base)


def test_noiseless_survival_is_one():
    data = run_rb(_cfg(lengths=(2, 8, 32), seed=1))
    assert np.max(np.abs(data.survival - 1.0)) < 1e-10
    assert np.max(data.leakage) < 1e-10


def test_depolarizing_survival_formula():
    p = 0.05
    lengths = (2, 4, 16, 48)
    data = run_rb(_cfg(lengths=lengths, n_sequences=20, shots=50,
                       injected_depolarizing=p, seed=2))
    pred = 0.5 + 0.5 * (1 - p) ** (np.array(lengths) + 1)
    got = data.survival.mean(axis=1)
    # binomial-ish scatter at 1000 draws per length
    assert np.max(np.abs(got - pred)) < 0.03


def test_thread_count_invariance():
    a = run_rb(_cfg(noise=RBNoise(sigma_j_rel=0.02, sigma_bz_hz=2e5, b_uniform_hz=28e6),
                    seed=5, threads=1))
    b = run_rb(_cfg(noise=RBNoise(sigma_j_rel=0.02, sigma_bz_hz=2e5, b_uniform_hz=28e6),
                    seed=5, threads=4))
    assert np.array_equal(a.survival, b.survival)
    assert np.array_equal(a.leakage, b.leakage)


def test_uniform_field_does_not_matter():
    a = run_rb(_cfg(noise=RBNoise(b_uniform_hz=0.0), seed=3))
    b = run_rb(_cfg(noise=RBNoise(b_uniform_hz=28e6), seed=3))
    assert np.allclose(a.survival, b.survival, atol=1e-10)


def test_sample_mode_bernoulli():
    data = run_rb(_cfg(mode="sample", shots=8, seed=4))
    assert data.leakage is None
    assert set(np.round(data.survival * 8).astype(int).flatten()) <= set(range(9))


def test_readout_error_shifts_survival():
    data = run_rb(_cfg(readout_error=0.1, seed=6))
    assert np.max(np.abs(data.survival - 0.9)) < 1e-10  # noiseless: p_s = 1 -> 0.9


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(lengths=(4, 2))
    with pytest.raises(ValueError):
        _cfg(mode="counts")
    with pytest.raises(ValueError):
        _cfg(readout_error=1.5)


# -- fitting ----------------------------------------------------------------


def _synthetic(lengths, alpha, noise_sd, rng, n_seq=20, beta=None, c=0.5):
    lengths = np.array(lengths)
    surv = 0.5 + 0.5 * alpha ** lengths[:, None] + rng.normal(0, noise_sd, (len(lengths), n_seq))
    leak = None
    if beta is not None:
        leak = c * (1 - beta ** lengths[:, None]) + rng.normal(
            0, noise_sd, (len(lengths), n_seq)
        )
    cfg = _cfg(lengths=tuple(int(x) for x in lengths), n_sequences=n_seq)
    return RBRawData(lengths, surv, leak, cfg)


def test_fit_exact_exponential():
    rng = np.random.default_rng(0)
    data = _synthetic((2, 4, 8, 16, 32, 64, 128, 256, 512), 0.997, 1e-6, rng)
    res = fit_rb(data)
    assert res.epsilon == pytest.approx(1.5e-3, rel=0.01)


def test_fit_flat_survival_degenerate():
    lengths = np.array([2, 4, 8])
    data = RBRawData(lengths, np.ones((3, 4)), np.zeros((3, 4)), _cfg())
    res = fit_rb(data)
    assert res.degenerate
    assert res.epsilon == 0.0 and res.epsilon_se == 0.0
    assert res.gamma == 0.0


def test_fit_leakage_initial_slope():
    rng = np.random.default_rng(1)
    data = _synthetic((8, 32, 128, 512, 2048, 8192), 0.999, 1e-5, rng,
                      beta=0.9997, c=0.5)
    res = fit_rb(data)
    assert res.gamma == pytest.approx(0.5 * (1 - 0.9997), rel=0.05)


def test_fit_needs_three_lengths():
    with pytest.raises(ValueError):
        fit_rb(RBRawData(np.array([2, 4]), np.ones((2, 3)), None, _cfg()))


def test_fit_self_consistency_coverage():
    """Parameter recovery over many synthetic repetitions: the 2-sigma
    interval should cover truth ~95% of the time."""
    rng = np.random.default_rng(7)
    alpha_true = 0.996
    hits = 0
    n_rep = 60
    for _ in range(n_rep):
        data = _synthetic((2, 8, 32, 128, 512), alpha_true, 5e-3, rng)
        res = fit_rb(data)
        eps_true = (1 - alpha_true) / 2
        if abs(res.epsilon - eps_true) <= 2 * res.epsilon_se:
            hits += 1
    assert hits >= int(0.85 * n_rep)


def test_pool_results_inverse_variance():
    rng = np.random.default_rng(2)
    results = [
        fit_rb(_synthetic((2, 8, 32, 128, 512), 0.996, 5e-3, rng)) for _ in range(6)
    ]
    eps, se = pool_results(results)
    assert se < min(r.epsilon_se for r in results)
    assert eps == pytest.approx(2e-3, abs=4 * se)


def test_oracle_p_zero():
    rep = validate_rb_oracle(GRID, FRAME, SPAM, 0.0, lengths=(2, 8, 32),
                             n_sequences=3, shots=2, seed=0)
    assert rep.passed and rep.fitted_epsilon < 1e-9


def test_oracle_rejects_large_p():
    with pytest.raises(ValueError):
        validate_rb_oracle(GRID, FRAME, SPAM, 0.5)


def test_oracle_high_p_short_lengths():
    rep = validate_rb_oracle(GRID, FRAME, SPAM, 0.02, lengths=(2, 4, 8, 16, 32, 64),
                             n_sequences=15, shots=40, seed=11)
    assert rep.passed, f"{rep.fitted_epsilon} vs {rep.expected_epsilon} ({rep.n_sigma} sigma)"
