"""Monte Carlo sampling: determinism, mixture weights, estimator accuracy."""

from fractions import Fraction

import numpy as np
import pytest

from homsums import (
    ClassicalLaw,
    Estimate,
    HomsumError,
    KernelFamily,
    SamplerSpec,
    UnknownSampler,
    classical_fourth_moment_formula,
    estimate_moment,
    family_kernel,
    gaussian_fourth_moment,
    mixture_t_moment,
    sample_mixture_t,
)

N_SMOKE = 200_000


def pair_kernel():
    return family_kernel(KernelFamily("product", 2), 2)


def test_spec_validation():
    with pytest.raises(UnknownSampler):
        SamplerSpec(law="cauchy", seed=1, sample_count=10)
    with pytest.raises(HomsumError):
        SamplerSpec(law="two-point", seed=1, sample_count=10, alpha=1.0)
    with pytest.raises(HomsumError):
        SamplerSpec(law="mixture-T", seed=1, sample_count=10, q=0)
    with pytest.raises(UnknownSampler):
        SamplerSpec(law="product-TX", seed=1, sample_count=10, base="poisson")


def test_seed_determinism_bit_for_bit():
    spec = SamplerSpec(law="gaussian", seed=99, sample_count=5000)
    k = family_kernel(KernelFamily("star", 2), 3)
    a = estimate_moment(k, spec, 4)
    b = estimate_moment(k, spec, 4)
    assert a == b
    c = estimate_moment(k, SamplerSpec(law="gaussian", seed=100, sample_count=5000), 4)
    assert c.mean != a.mean


def test_mixture_t_degenerate_alpha_zero():
    spec = SamplerSpec(law="mixture-T", seed=3, sample_count=1000, alpha=0.0, q=3)
    t = sample_mixture_t(spec)
    assert np.all(t == 1.0)


def test_mixture_t_lower_bound():
    alpha, q = 0.5, 2
    spec = SamplerSpec(law="mixture-T", seed=4, sample_count=50_000, alpha=alpha, q=q)
    t = sample_mixture_t(spec)
    assert np.all(t >= (1 - alpha) ** (q / 2) - 1e-12)


def test_alpha_for_moment_ratio_inverts_fourth_moment():
    from homsums import alpha_for_moment_ratio

    theta, q = 0.5, 3
    alpha = alpha_for_moment_ratio(theta, q)
    assert 0 <= alpha < 1
    assert (1 + alpha**2) ** q == pytest.approx(1 + theta)
    with pytest.raises(HomsumError):
        alpha_for_moment_ratio(5.0, 1)  # alpha would reach sqrt(5) > 1
    with pytest.raises(HomsumError):
        alpha_for_moment_ratio(-0.1, 2)


def test_mixture_t_moment_closed_form():
    assert mixture_t_moment(2, Fraction(1, 2), 4) == Fraction(25, 16)
    assert mixture_t_moment(1, Fraction(1, 2), 2) == 1
    with pytest.raises(HomsumError):
        mixture_t_moment(2, Fraction(1, 2), 6)


@pytest.mark.parametrize("q,alpha", [(1, 0.5), (2, 0.5), (3, 0.25)])
def test_mixture_t_fourth_moment_estimate(q, alpha):
    spec = SamplerSpec(law="mixture-T", seed=11, sample_count=N_SMOKE, alpha=alpha, q=q)
    t = sample_mixture_t(spec)
    vals = t**4
    mean = vals.mean()
    stderr = vals.std(ddof=1) / np.sqrt(len(vals))
    exact = float(mixture_t_moment(q, Fraction(alpha), 4))
    assert abs(mean - exact) <= 4 * stderr


def test_rademacher_product_pair_fourth_power_is_constant():
    spec = SamplerSpec(law="rademacher", seed=5, sample_count=2000)
    est = estimate_moment(pair_kernel(), spec, 4)
    assert est.mean == 1.0 and est.stderr == 0.0


def test_gaussian_star_estimate_matches_exact():
    k = family_kernel(KernelFamily("star", 2), 3)
    spec = SamplerSpec(law="gaussian", seed=12, sample_count=N_SMOKE)
    est = estimate_moment(k, spec, 4)
    exact = float(gaussian_fourth_moment(k).value)
    assert exact == 9
    assert abs(est.mean - exact) <= 4 * est.stderr


def test_second_moment_estimate_near_one(rng):
    from homsums import random_admissible_kernel

    k = random_admissible_kernel(rng, 2, 4)
    spec = SamplerSpec(law="rademacher", seed=21, sample_count=N_SMOKE)
    est = estimate_moment(k, spec, 2)
    assert abs(est.mean - 1.0) <= 4 * est.stderr


def test_product_tx_estimate_matches_composite_law():
    # entries T*X have fourth moment (1+alpha^2)^q * E[X^4]
    k = pair_kernel()
    q, alpha = 2, 0.5
    spec = SamplerSpec(
        law="product-TX", seed=31, sample_count=N_SMOKE, alpha=alpha, q=q, base="gaussian"
    )
    est = estimate_moment(k, spec, 4)
    m4 = mixture_t_moment(q, Fraction(1, 2), 4) * 3
    exact = float(classical_fourth_moment_formula(k, ClassicalLaw.from_fourth_moment(m4)).value)
    assert abs(est.mean - exact) <= 4 * est.stderr


def test_estimate_order_validation():
    spec = SamplerSpec(law="gaussian", seed=1, sample_count=100)
    with pytest.raises(HomsumError):
        estimate_moment(pair_kernel(), spec, 5)


def test_estimate_json_fields():
    est = Estimate(mean=1.0, stderr=0.1, sample_count=10, seed=3)
    assert est.to_json() == {"mean": 1.0, "stderr": 0.1, "n": 10, "seed": 3}
