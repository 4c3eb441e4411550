import math

import numpy as np
import pytest

import levyou

GAUSSIAN = {
    "model": {"m": 1, "k": 1, "d": 1, "A": [[1.0]], "B": [[1.0]], "D": [[0.0]]},
    "measure": {"components": []},
    "run": {"t": 1.0, "seed": 3},
}


def test_gaussian_exponent_and_covariance():
    model = levyou.Model(GAUSSIAN)
    sigma = model.gaussian_covariance()[0, 0]
    assert sigma == pytest.approx((math.exp(2.0) - 1.0) / 2.0, rel=1e-10)
    z = np.array([0.0, 0.5, 1.0, 3.0])
    np.testing.assert_allclose(model.psi(z), -0.5 * sigma * z**2, rtol=1e-9, atol=1e-15)
    assert abs(model.charfn([1.0])[0] - 0.20244965821838912) < 1e-12


def test_density_matches_normal():
    (x,), p, meta = levyou.Model(GAUSSIAN).density()
    sigma = (math.exp(2.0) - 1.0) / 2.0
    want = np.exp(-(x**2) / (2 * sigma)) / math.sqrt(2 * math.pi * sigma)
    assert np.max(np.abs(p - want)) < 1e-4
    assert abs(meta["normalization"] - 1.0) < 1e-3


def test_simulate_is_reproducible():
    model = levyou.Model(GAUSSIAN)
    a = model.simulate(20000, seed=4)
    b = model.simulate(20000, seed=4, threads=2)
    assert a.shape == (20000, 1)
    np.testing.assert_array_equal(a, b)
    assert a.var() == pytest.approx((math.exp(2.0) - 1.0) / 2.0, rel=0.05)


def test_analyze_and_examples():
    assert "example2" in levyou.example_ids()
    report = levyou.Model(levyou.example_config("example4-modified")).analyze()
    assert report["conclusions"]["density_exists"]["value"] == "yes"
    assert all(ok for _, ok, _ in levyou.reproduce("example4-first"))


def test_errors_map_to_exceptions():
    bad = dict(GAUSSIAN, model={"m": 1, "d": 1, "A": [[1.0, 2.0]], "D": [[1.0]]})
    with pytest.raises(levyou.DimensionError):
        levyou.Model(bad)
    with pytest.raises(levyou.ConfigError):
        levyou.reproduce("nope")
    with pytest.raises(levyou.RefusedError):
        levyou.Model(levyou.example_config("example3")).density()
    k = levyou.theorem1_constants(1.0, 1.0)
    assert k["beta"] == pytest.approx(math.exp(-1.0))
