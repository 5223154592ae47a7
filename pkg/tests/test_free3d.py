import math

import numpy as np
import pytest
from scipy.special import ive

from lgfkit.free3d import (IEvaluator, _integrate_products, build_table, canonical,
                           canonical_tuples, lgf2_batch, lgf2_eval, lgf3_batch, lgf3_eval,
                           sphere_tuples)
from lgfkit.stencils import SPLIT_IDS


@pytest.fixture(scope="module")
def ev2():
    return IEvaluator("lgf2")


def test_canonical_forms():
    assert canonical((-2, 1, 0)) == (0, 1, 2)
    assert canonical_tuples(1, 3) == [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)]
    assert len(canonical_tuples(8, 3)) == math.comb(11, 3)
    assert len([n for n in sphere_tuples(19) if max(n) <= 19]) == 779


def test_I_eval_small_t_and_bessel(ev2):
    assert ev2.I_eval(0, 0.0) == pytest.approx(1, abs=1e-16)
    assert abs(ev2.I_eval(3, 0.0)) < 1e-16
    assert ev2.I_eval(1, 2.5) == pytest.approx(ive(1, 5.0), abs=1e-16)
    for t in (0.3, 40.0, 700.0, 2000.0, 1e5):
        for n in (0, 1, 7, 22):
            assert ev2.I_eval(n, t) == pytest.approx(ive(n, 2 * t), abs=2e-16, rel=1e-14)
    with pytest.raises(ValueError):
        ev2.I_eval(23, 2 * ev2.t_min)
    with pytest.raises(ValueError):
        ev2.I_eval(0, -1.0)


def test_regime_boundary_jump_matches_true_drift(ev2):
    # the function itself moves by ~1e-11 across t_min (1 +- 1e-9); the method
    # switch must add no more than 10 eps_a on top of that
    t0 = ev2.t_min
    lo, hi = t0 * (1 - 1e-9), t0 * (1 + 1e-9)
    for n in range(ev2.n_max + 1):
        jump = ev2.I_eval(n, hi) - ev2.I_eval(n, lo)
        drift = ive(n, 2 * hi) - ive(n, 2 * lo)
        assert abs(jump - drift) <= 10 * ev2.pack.eps_a


@pytest.mark.parametrize("name", SPLIT_IDS)
def test_quadrature_and_series_agree_at_t_min(name):
    ev = IEvaluator(name)
    top = ev.n_max + 1
    diff = np.abs(ev.I_fft(ev.t_min)[:top] - ev.I_series(ev.t_min)[:top])
    assert diff.max() <= 10 * ev.pack.eps_a


def test_lgf3_watson_value_and_symmetry(ev2):
    assert lgf3_eval(ev2, (0, 0, 0)) == pytest.approx(0.2527310098586629, abs=1e-15)
    a, b = lgf3_batch(ev2, [(1, 2, 3), (-3, 2, 1)])
    assert a == b
    with pytest.raises(ValueError):
        lgf3_eval(ev2, (0, 0, 23))


@pytest.mark.parametrize("name", ["lgf4", "lgf8"])
def test_positivity_and_decay(name):
    ev = IEvaluator(name)
    g = lgf3_batch(ev, [(n, 0, 0) for n in range(12)])
    assert np.all(g > 0) and np.all(np.diff(g[1:]) < 0)


def test_far_field_continuum_limit():
    g = lgf3_eval(IEvaluator("lgf4"), (8, 0, 0))
    assert g == pytest.approx(1 / (4 * math.pi * 8), rel=0.03)
    more = IEvaluator("lgf4", J=12)
    assert lgf3_eval(more, (8, 0, 0)) == pytest.approx(g, abs=1e-14)


def test_tail_consistency(ev2):
    tuples = [(0, 0, 0), (3, 2, 1), (22, 22, 22)]
    T = ev2.T_min
    idx = np.array(tuples)
    mid = _integrate_products(ev2, idx, T, 2 * T, False, 1e-17, 1e-16)
    lhs = ev2.tail3(tuples, 2 * T) + mid
    assert np.abs(lhs - ev2.tail3(tuples, T)).max() <= 10 * ev2.pack.eps_a


def test_lgf2_relative(ev2):
    assert lgf2_eval(ev2, (0, 0)) == 0.0
    a, b = lgf2_batch(ev2, [(1, 0), (0, 1)])
    assert a == b
    assert a == pytest.approx(-0.25, abs=1e-14)
    # continuum: G(n) ~ -(1/2pi) log|n| + const
    g = lgf2_batch(ev2, [(10, 0), (20, 0)])
    assert g[1] - g[0] == pytest.approx(-math.log(2) / (2 * math.pi), abs=1e-3)


def test_build_table_counts(ev2):
    t = build_table(ev2, 1)
    assert t.values.size == 4 and t.evaluations == 4
    t2 = build_table(ev2, 16, dimension=2)
    assert t2.lookup((0, 0)) == 0.0
    ts = build_table(ev2, 6, sphere_radius=5.0)
    assert np.isnan(ts.lookup((0, 6, 6))) and not np.isnan(ts.lookup((0, 0, 4)))
    assert ts.evaluations == sum(1 for n in canonical_tuples(6, 3) if sum(v * v for v in n) < 25)
    with pytest.raises(ValueError):
        build_table(ev2, 23)
