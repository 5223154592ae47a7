"""Fully unbounded LGFs of dimension-split stencils in 3D and 2D.

With ``I(n, t) = 1/(2 pi) int exp(-t sigma(k)) cos(n k) dk`` the 3D LGF is
``G(n) = int_0^inf I(n1,t) I(n2,t) I(n3,t) dt``.  The integral is split
into three pieces:

* ``[0, t_min]``: adaptive quadrature in ``t`` with ``I`` from a spectrally
  accurate periodic trapezoid rule (one real FFT per node);
* ``[t_min, T_min]``: adaptive quadrature with ``I`` from its large-t series;
* ``[T_min, inf)``: the series integrated term by term.

In 2D the integral diverges, so the relative LGF ``G(n) - G(0)`` is computed
from ``I(n1) I(n2) - I(0)^2`` instead.
"""
from __future__ import annotations

import math
from itertools import combinations_with_replacement

import numpy as np

from .quadrature import integrate_1d_vec, integrate_periodic
from .series import ExpansionPack, build_expansion_pack, g2_value, g3_value
from .stencils import SplitStencil, get_stencil, split_symbol

__all__ = [
    "IEvaluator",
    "canonical",
    "canonical_tuples",
    "sphere_tuples",
    "lgf3_batch",
    "lgf3_eval",
    "lgf2_batch",
    "lgf2_eval",
    "build_table",
]


def canonical(n) -> tuple[int, ...]:
    """Sorted absolute values: the representative of the symmetry orbit of ``n``."""
    return tuple(sorted(abs(int(v)) for v in n))


def canonical_tuples(extent: int, dim: int) -> list[tuple[int, ...]]:
    return list(combinations_with_replacement(range(extent + 1), dim))


def sphere_tuples(radius: float, dim: int = 3) -> list[tuple[int, ...]]:
    """Canonical tuples with Euclidean norm strictly below ``radius``."""
    r = int(math.ceil(radius))
    return [n for n in canonical_tuples(r, dim) if sum(v * v for v in n) < radius * radius]


class IEvaluator:
    """Evaluates ``I(n, t)`` for one stencil in both regimes.

    ``pack`` fixes the number of series terms, the thresholds and the
    largest index for which the series regime is trusted.
    """

    def __init__(self, stencil: SplitStencil | str, pack: ExpansionPack | None = None, **pack_kw):
        if isinstance(stencil, str):
            stencil = get_stencil(stencil)
        if not stencil.is_split:
            raise ValueError("free-space evaluation is implemented for split stencils only")
        self.stencil = stencil
        self.pack = pack if pack is not None else build_expansion_pack(stencil, **pack_kw)
        self.t_min = self.pack.t_min
        self.T_min = self.pack.T_min
        self.n_max = self.pack.n_max
        J = self.pack.J
        # b_j(n) rounded once from exact rationals
        self._bvals = np.array([[float(self.pack.b[j](n)) for j in range(J)]
                                for n in range(self.n_max + 1)])

    # -- I(n, t) -----------------------------------------------------------
    def I_eval(self, n: int, t: float) -> float:
        n = abs(int(n))
        if t < 0:
            raise ValueError("t must be non-negative")
        if t > self.t_min:
            if n > self.n_max:
                raise ValueError(f"|n| = {n} exceeds n_max = {self.n_max} in the series regime")
            return float(self.I_series(np.array([t]))[0, n])
        m = 4
        while m < 4 * (n + 1):
            m *= 2
        st = self.stencil
        res = integrate_periodic(
            lambda k: np.exp(-t * split_symbol(st, k)) * np.cos(n * k) / (2 * np.pi),
            2 * np.pi, eps=1e-17, min_points=m)
        return res.value

    @staticmethod
    def fft_points(t: float, n_top: int) -> int:
        # aliasing error ~ I(M - n, t); keep it below exp(-40)
        need = n_top + 1 + 40 + math.sqrt(1600.0 + 160.0 * t)
        m = 16
        while m < max(need, 2 * (n_top + 1)):
            m *= 2
        return m

    def I_fft(self, t, n_top: int | None = None) -> np.ndarray:
        """``I(n, t)`` for ``n = 0..n_top`` at every ``t``; shape ``(len(t), n_top + 1)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n_top = self.n_max if n_top is None else n_top
        out = np.empty((t.size, n_top + 1))
        m = self.fft_points(float(t.max()), n_top)
        k = 2 * np.pi * np.arange(m) / m
        sig = split_symbol(self.stencil, k)
        spec = np.fft.rfft(np.exp(-t[:, None] * sig[None, :]), axis=1).real / m
        out[:] = spec[:, : n_top + 1]
        return out

    def I_series(self, t) -> np.ndarray:
        """Large-t series for ``n = 0..n_max``; shape ``(len(t), n_max + 1)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = 1.0 / t
        acc = np.zeros((t.size, self.n_max + 1))
        for j in range(self.pack.J - 1, -1, -1):
            acc = acc * x[:, None] + self._bvals[None, :, j]
        return acc / np.sqrt(4 * np.pi * t)[:, None]

    def I_block(self, t, n_top: int | None = None) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.all(t <= self.t_min):
            return self.I_fft(t, n_top)
        if np.all(t >= self.t_min):
            return self.I_series(t)[:, : (self.n_max if n_top is None else n_top) + 1]
        raise ValueError("mixed regimes in one block")

    # -- tails ---------------------------------------------------------------
    def _b_at(self, n: int) -> list[float]:
        return list(self._bvals[n]) + [0.0]

    def tail3(self, tuples, T: float) -> np.ndarray:
        J = self.pack.J
        out = np.empty(len(tuples))
        rows = [self._bvals[n] for n in range(self.n_max + 1)]
        pref = 1.0 / math.sqrt(16 * math.pi**3 * T)
        for i, n in enumerate(tuples):
            bv = [rows[v] for v in n]
            acc = 0.0
            for j in range(J - 1, -1, -1):
                acc = acc / T + g3_value(bv, j)
            out[i] = pref * acc
        return out

    def tail2(self, tuples, T: float) -> np.ndarray:
        J = self.pack.J
        out = np.empty(len(tuples))
        b0 = self._bvals[0]
        for i, n in enumerate(tuples):
            bv = [self._bvals[v] for v in n]
            acc = 0.0
            for j in range(J - 1, 0, -1):
                acc = (acc + g2_value(bv, b0, j)) / T
            out[i] = acc / (4 * math.pi)
        return out


def _check_tuples(ev: IEvaluator, tuples, dim: int):
    canon = [canonical(n) for n in tuples]
    for n in canon:
        if len(n) != dim:
            raise ValueError(f"expected {dim} indices, got {n}")
        if n[-1] > ev.n_max:
            raise ValueError(f"index {n} exceeds n_max = {ev.n_max} of the expansion pack")
    return canon


def _integrate_products(ev: IEvaluator, idx: np.ndarray, a: float, b: float,
                        relative: bool, eps_a: float, eps_r: float) -> np.ndarray:
    n_top = int(idx.max()) if idx.size else 0
    if b <= ev.t_min:
        n_top = max(n_top, 0)

    def f(t):
        I = ev.I_block(t, None if b > ev.t_min else n_top)
        vals = I[:, idx[:, 0]]
        for col in range(1, idx.shape[1]):
            vals = vals * I[:, idx[:, col]]
        if relative:
            vals = vals - (I[:, 0] ** idx.shape[1])[:, None]
        return vals

    v, _, _ = integrate_1d_vec(f, a, b, eps_a, eps_r, max_subdivisions=4000)
    return np.atleast_1d(v)


def lgf3_batch(ev: IEvaluator, tuples) -> np.ndarray:
    """3D LGF at many index triples; symmetric inputs give identical bits."""
    canon = _check_tuples(ev, tuples, 3)
    uniq = sorted(set(canon))
    idx = np.array(uniq, dtype=np.int64).reshape(-1, 3)
    pk = ev.pack
    # split the tolerance budget between the two quadrature pieces
    ea, er = pk.eps_a / 4, pk.eps_r / 4
    g = _integrate_products(ev, idx, 0.0, ev.t_min, False, ea, er)
    if ev.T_min > ev.t_min:
        g = g + _integrate_products(ev, idx, ev.t_min, ev.T_min, False, ea, er)
    g = g + ev.tail3(uniq, ev.T_min)
    lookup = dict(zip(uniq, g))
    return np.array([lookup[n] for n in canon])


def lgf3_eval(ev: IEvaluator, n) -> float:
    return float(lgf3_batch(ev, [n])[0])


def lgf2_batch(ev: IEvaluator, pairs) -> np.ndarray:
    """Relative 2D LGF ``G(n) - G(0)``; exactly zero at the origin."""
    canon = _check_tuples(ev, pairs, 2)
    uniq = sorted(set(canon))
    idx = np.array(uniq, dtype=np.int64).reshape(-1, 2)
    pk = ev.pack
    T = max(pk.T_2d, ev.t_min)
    ea, er = pk.eps_a / 4, pk.eps_r / 4
    g = _integrate_products(ev, idx, 0.0, ev.t_min, True, ea, er)
    if T > ev.t_min:
        g = g + _integrate_products(ev, idx, ev.t_min, T, True, ea, er)
    g = g + ev.tail2(uniq, T)
    lookup = dict(zip(uniq, g))
    lookup[(0, 0)] = 0.0
    return np.array([lookup[n] for n in canon])


def lgf2_eval(ev: IEvaluator, n) -> float:
    return float(lgf2_batch(ev, [n])[0])


def build_table(ev: IEvaluator, box_extent: int, dimension: int = 3,
                sphere_radius: float | None = None):
    """Evaluate every canonical tuple of the box (or of a sphere inside it)."""
    from .tables import LgfTable

    if box_extent > ev.n_max:
        raise ValueError(f"box extent {box_extent} exceeds n_max = {ev.n_max}")
    if dimension not in (2, 3):
        raise ValueError("dimension must be 2 or 3")
    tuples = canonical_tuples(box_extent, dimension)
    wanted = tuples
    if sphere_radius is not None:
        wanted = [n for n in tuples if sum(v * v for v in n) < sphere_radius**2]
    batch = lgf3_batch if dimension == 3 else lgf2_batch
    vals = batch(ev, wanted)
    lookup = dict(zip(wanted, vals))
    values = np.array([lookup.get(n, np.nan) for n in tuples])
    pk = ev.pack
    return LgfTable(ev.stencil.name, dimension, box_extent, pk.J, pk.eps_a, pk.eps_r,
                    pk.t_min, pk.T_min if dimension == 3 else max(pk.T_2d, pk.t_min),
                    values, evaluations=len(wanted))
