import warnings

import numpy as np
import pytest

from lgfkit._kernels import direct_convolve3
from lgfkit.harness import (DomainSpec, ResidualReport, ZeroMeanWarning, apply_field,
                            convergence_study, free_table_dense, manufactured, observed_orders,
                            residual_1unb, residual_3unb, solve_one_unbounded, solve_periodic,
                            solve_unbounded, u_per, u_per_dd, u_unb, u_unb_dd)
from lgfkit.stencils import get_stencil, operator_entries, split_symbol


@pytest.fixture(scope="module")
def G8():
    return free_table_dense("lgf2", 8)


def test_domain_spec():
    d = DomainSpec(4, 2.0)
    assert d.h == 0.5
    assert d.coords().tolist() == [0.25, 0.75, 1.25, 1.75]


def test_residual_of_delta_field():
    f = np.zeros((5, 5, 5))
    f[0, 0, 0] = 1.0
    rep = residual_3unb(f, "lgf2", 2)
    assert rep.R_max == 5.0 and rep.n_res == (0, 0, 0)
    assert rep.to_dict()["region"] == [[0, 2], [0, 2], [0, 2]]


def test_residual_constant_shift_and_coverage(G8):
    a = residual_3unb(G8, "lgf2", 5)
    b = residual_3unb(G8 + 1.0, "lgf2", 5)
    # constants lie in the nullspace; only rounding of the larger values differs
    assert a.R_max < 1e-15 and b.R_max < 5e-15
    with pytest.raises(IndexError, match="outside"):
        residual_3unb(G8, "lgf2", 7)


def test_residual_1unb_small():
    rep = residual_1unb("lgf2", 4)
    assert isinstance(rep, ResidualReport) and rep.R_max < 1e-15


def test_apply_field_policies():
    f = np.random.default_rng(0).standard_normal((6, 6, 6))
    ent = operator_entries(get_stencil("lgf2"))
    out = apply_field(ent, f, ("periodic",) * 3, (0, 0, 0), (5, 5, 5))
    ref = 6 * f - sum(np.roll(f, s, axis=a) for a in range(3) for s in (-1, 1))
    assert np.allclose(out, ref, atol=1e-14)
    with pytest.raises(ValueError):
        apply_field(ent, f, ("mirror",) * 3, (0, 0, 0), (1, 1, 1))


def test_hockney_eastwood_matches_direct_convolution(G8):
    f = np.random.default_rng(1).standard_normal((8, 8, 8))
    N = 8
    m = np.abs(np.arange(-N + 1, N))
    kernel = G8[np.ix_(m, m, m)]
    direct = direct_convolve3(f, kernel)
    fast = solve_unbounded(G8, f)
    assert np.abs(fast - direct).max() <= 1e-13 * np.abs(direct).max()


def test_delta_and_zero_sources(G8):
    f = np.zeros((8, 8, 8))
    assert np.array_equal(solve_unbounded(G8, f), np.zeros_like(f))
    f[0, 0, 0] = 1.0
    assert solve_unbounded(G8, f, h=0.5) == pytest.approx(0.25 * G8, abs=1e-15)
    with pytest.raises(ValueError):
        solve_unbounded(G8[:4, :4, :4], f)


def test_periodic_eigenfunction_and_mean_warning():
    st = get_stencil("lgf4")
    N, h = 16, 0.1
    x = np.arange(N)
    f = np.cos(2 * np.pi * x / N)[:, None, None] * np.ones((1, N, N))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        u = solve_periodic(st, f, h)
    assert u == pytest.approx(h * h * f / split_symbol(st, 2 * np.pi / N), abs=1e-14)
    with pytest.warns(ZeroMeanWarning):
        u = solve_periodic(st, np.ones((4, 4, 4)))
    assert np.abs(u).max() < 1e-15


@pytest.mark.parametrize("name", ["lgf4", "lgf8"])
def test_one_unbounded_solve_is_exact_on_discrete_data(name):
    st = get_stencil(name)
    N = 16
    rng = np.random.default_rng(2)
    uh = np.zeros((N, N, N))
    uh[5:11] = rng.standard_normal((6, N, N))
    padded = np.zeros((N + 8, N, N))
    padded[4:N + 4] = uh
    f = apply_field(operator_entries(st), padded, ("halo", "periodic", "periodic"),
                    (4, 0, 0), (N + 3, N - 1, N - 1))
    u = solve_one_unbounded(st, f)
    assert np.abs(u - uh).max() <= 1e-12 * np.abs(f).max()


def test_manufactured_derivatives():
    x = np.linspace(0.05, 0.95, 7)
    h = 1e-4
    for u, dd in ((u_per, u_per_dd), (u_unb, u_unb_dd)):
        fd = (u(x + h) - 2 * u(x) + u(x - h)) / h**2
        assert dd(x) == pytest.approx(fd, rel=1e-5, abs=1e-5 * np.abs(dd(x)).max())
    assert u_unb(np.array([0.0, 1.0])).tolist() == [0.0, 0.0]
    u, f = manufactured(DomainSpec(8))
    assert u.shape == f.shape == (8, 8, 8)
    with pytest.raises(ValueError):
        manufactured(DomainSpec(8, bc=("wall", "periodic", "periodic")))


def test_observed_orders():
    assert observed_orders([1.0, 0.25, 0.0625]) == [2.0, 2.0]


def test_convergence_study_lgf2():
    rows = convergence_study(["lgf2"], "one_unbounded", [16, 32, 64, 128])
    assert [r[1] for r in rows] == [16, 32, 64, 128] and rows[0][3] is None
    assert rows[-1][3] == pytest.approx(2.0, abs=0.4)
    with pytest.raises(ValueError):
        convergence_study(["lgf2"], "one_unbounded", [32, 16])
    with pytest.raises(ValueError):
        convergence_study(["meh4"], "unbounded", [8])
