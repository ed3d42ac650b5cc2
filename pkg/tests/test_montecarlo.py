"""Pathwise evaluation and statistical cross-checks of the algebra."""

import math

import numpy as np
import pytest

from chaoscalc import (
    ChaosProcess,
    ChaosVector,
    FbmKernel,
    OuKernel,
    SymKernel,
    evaluate,
    integrate_plain,
    ito_oracle,
    make_grid,
    mc_moments,
    pointwise,
    sample_noise,
    sym_store,
    wick,
)
from chaoscalc.montecarlo import evaluate_block, sample_noise_block
from chaoscalc.testing import random_chaos_process, random_chaos_vector, rng_from

GRID = make_grid(1.0, 8)


def brownian_process(grid) -> ChaosProcess:
    return ChaosProcess.from_function(
        grid,
        lambda j: (
            ChaosVector.brownian_at(grid, grid.t_left(j))
            if j > 0
            else ChaosVector.zero(grid)
        ),
    )


def test_noise_reproducible_and_seed_sensitive():
    a = sample_noise(GRID, 42)
    b = sample_noise(GRID, 42)
    c = sample_noise(GRID, 43)
    assert np.array_equal(a.xi, b.xi)
    assert not np.array_equal(a.xi, c.xi)
    assert a.xi.shape == (GRID.cells,)


def test_noise_statistics():
    block = sample_noise_block(GRID, 100_000, 7)
    assert abs(float(np.mean(block[:, 0]))) < 3 * 10 ** -2.5
    total = math.sqrt(GRID.step) * block.sum(axis=1)
    assert abs(float(np.var(total)) - GRID.horizon) / GRID.horizon < 0.05


def test_evaluate_constant_and_brownian():
    omega = sample_noise(GRID, 3)
    c = ChaosVector.deterministic(GRID, 2.5)
    assert evaluate(c, omega) == 2.5
    b = ChaosVector.brownian_at(GRID, 1.0)
    want = float(np.sum(omega.increments()))
    assert evaluate(b, omega) == pytest.approx(want, rel=1e-12)


def test_evaluate_linear():
    rng = rng_from(11)
    omega = sample_noise(GRID, 5)
    a = random_chaos_vector(GRID, 3, rng)
    b = random_chaos_vector(GRID, 3, rng)
    lhs = evaluate(a.scale(2.0).add(b.scale(-1.5)), omega)
    rhs = 2.0 * evaluate(a, omega) - 1.5 * evaluate(b, omega)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_pointwise_product_evaluates_pathwise():
    rng = rng_from(13)
    for seed in range(5):
        omega = sample_noise(GRID, 100 + seed)
        a = random_chaos_vector(GRID, 2, rng)
        b = random_chaos_vector(GRID, 2, rng)
        prod = pointwise(a, b)
        lhs = evaluate(prod, omega)
        rhs = evaluate(a, omega) * evaluate(b, omega)
        assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_hermite_square_identity_pathwise():
    f = ChaosVector.brownian_at(GRID, 1.0)
    sq = pointwise(f, f)
    for seed in range(5):
        omega = sample_noise(GRID, seed)
        assert evaluate(sq, omega) == pytest.approx(evaluate(f, omega) ** 2, rel=1e-11)


def test_wick_expectation_factorizes_exactly():
    rng = rng_from(17)
    a = random_chaos_vector(GRID, 2, rng)
    b = random_chaos_vector(GRID, 2, rng)
    assert wick(a, b).expectation() == pytest.approx(
        a.expectation() * b.expectation(), rel=1e-12
    )


def test_isometry_monte_carlo():
    rng = rng_from(19)
    block = sample_noise_block(GRID, 100_000, 23)
    for n in (1, 2, 3):
        k = None
        from chaoscalc.testing import random_sym_kernel

        k = random_sym_kernel(GRID, n, rng, n_entries=6)
        vec = ChaosVector.from_kernel(k)
        vals = evaluate_block(vec, block)
        want = math.factorial(n) * k.norm_sq()
        got = float(np.mean(vals ** 2))
        se = float(np.std(vals ** 2)) / math.sqrt(len(vals))
        assert abs(got - want) < 3 * se


def test_orthogonality_across_orders():
    rng = rng_from(29)
    block = sample_noise_block(GRID, 100_000, 31)
    f = ChaosVector.from_kernel(sym_store(1, [((0,), 1.0), ((3,), -0.5)], GRID))
    h = ChaosVector.from_kernel(sym_store(2, [((1, 2), 1.0)], GRID))
    prods = evaluate_block(f, block) * evaluate_block(h, block)
    se = float(np.std(prods)) / math.sqrt(len(prods))
    assert abs(float(np.mean(prods))) < 3 * se


def test_ito_oracle_constant_gives_endpoint():
    proc = ChaosProcess.constant(GRID, ChaosVector.deterministic(GRID, 1.0))
    omega = sample_noise(GRID, 37)
    want = float(np.sum(omega.increments()))
    assert ito_oracle(proc, omega) == pytest.approx(want, rel=1e-12)


def test_ito_oracle_rejects_non_adapted():
    bad = ChaosProcess.from_function(
        GRID, lambda j: ChaosVector.from_kernel(SymKernel.indicator(GRID, GRID.t_left(j), 1.0))
    )
    with pytest.raises(ValueError):
        ito_oracle(bad, sample_noise(GRID, 1))


def test_adapted_integral_matches_ito_pathwise():
    """Unit kernel + adapted integrand: the pipeline value evaluates to the
    forward sum on every path."""
    g = make_grid(1.0, 16)
    kernel = FbmKernel(H=0.5)
    for proc in (brownian_process(g), random_chaos_process(g, 2, rng_from(41), adapted=True)):
        value = integrate_plain(proc, kernel, 1.0).value
        for seed in range(20):
            omega = sample_noise(g, 1000 + seed)
            lhs = evaluate(value, omega)
            rhs = ito_oracle(proc, omega)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_mc_moments_deterministic():
    m = mc_moments(ChaosVector.deterministic(GRID, 4.0), 1000, 3)
    assert m.mean == 4.0
    assert m.variance == 0.0
    with pytest.raises(ValueError):
        mc_moments(ChaosVector.deterministic(GRID, 1.0), 1, 3)


def test_mc_moments_brownian_variance():
    m = mc_moments(ChaosVector.brownian_at(GRID, 1.0), 100_000, 5)
    assert abs(m.mean) < 3 * m.se_mean
    assert abs(m.variance - 1.0) < 3 * m.se_variance


def test_mc_moments_estimate_chaos_statistics():
    rng = rng_from(43)
    vec = random_chaos_vector(GRID, 2, rng)
    m = mc_moments(vec, 200_000, 11)
    assert abs(m.mean - vec.expectation()) < 4 * m.se_mean
    want_var = vec.gnorm(0.0) ** 2 - vec.expectation() ** 2
    assert abs(m.variance - want_var) < 4 * m.se_variance


def test_driver_variance_ou_closed_form():
    g = make_grid(1.0, 16)
    k = OuKernel(alpha=1.0)
    proc = ChaosProcess.constant(g, ChaosVector.deterministic(g, 1.0))
    x1 = integrate_plain(proc, k, 1.0).value
    m = mc_moments(x1, 100_000, 13)
    want = (1.0 - math.exp(-2.0)) / 2.0
    assert abs(m.mean) < 3 * m.se_mean
    assert abs(m.variance - want) < 3 * m.se_variance


def test_driver_variance_fbm_is_unit():
    g = make_grid(1.0, 16)
    k = FbmKernel(H=0.7)
    proc = ChaosProcess.constant(g, ChaosVector.deterministic(g, 1.0))
    x1 = integrate_plain(proc, k, 1.0).value
    m = mc_moments(x1, 100_000, 17)
    # variance target 1 with a 5% quadrature allowance at this resolution
    assert abs(m.variance - 1.0) < 3 * m.se_variance + 0.05
