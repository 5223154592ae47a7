"""Finite-difference stencils for the negative Laplacian and their symbols.

Two families are supported.  Dimension-split stencils are built from a 1D
second-difference ``sum_j a_j (u(n+j) + u(n-j)) + a_0 u(n)`` applied along
every axis.  Mehrstellen pairs ``(L, R)`` solve ``L u = R f`` and are stored
as orbit representatives (sorted non-negative index triples).

Sign convention: every operator here approximates ``-h^2 Laplacian``, so the
symbols are non-negative and the Green's function of ``L G = R delta`` is
positive in 3D.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Mapping

import numpy as np

from .series import MultiPoly, RationalPoly

__all__ = [
    "SplitStencil",
    "MehrstellenPair",
    "get_stencil",
    "STENCIL_IDS",
    "SPLIT_IDS",
    "MEHR_IDS",
    "split_symbol",
    "split_symbol_trig",
    "split_y_poly",
    "chebyshev_t",
    "mehr_symbol_polys",
    "mehr_symbols",
    "mehr_symbols_trig",
    "q_poly",
    "axial_mehr_coeffs",
    "orbit",
    "operator_entries",
    "apply_operator",
]

F = Fraction


@dataclass(frozen=True)
class SplitStencil:
    """1D generator of a dimension-split operator.

    ``coeffs[j-1]`` is ``a_j`` of the second-difference stencil; the central
    weight is ``a_0 = -2 sum a_j``.
    """

    name: str
    order: int
    coeffs: tuple[Fraction, ...]
    sigma_max: Fraction

    @property
    def width(self) -> int:
        return len(self.coeffs)

    @property
    def a0(self) -> Fraction:
        return -2 * sum(self.coeffs)

    @property
    def is_split(self) -> bool:
        return True


@dataclass(frozen=True)
class MehrstellenPair:
    """Compact scheme ``L u = R f`` stored by symmetry orbit representatives."""

    name: str
    order: int
    lhs: Mapping[tuple[int, int, int], Fraction]
    rhs: Mapping[tuple[int, int, int], Fraction]

    @property
    def w_L(self) -> int:
        return max(max(k) for k in self.lhs)

    @property
    def w_R(self) -> int:
        return max(max(k) for k in self.rhs)

    @property
    def is_split(self) -> bool:
        return False


_REGISTRY = {
    "lgf2": SplitStencil("lgf2", 2, (F(-1),), F(4)),
    "lgf4": SplitStencil("lgf4", 4, (F(-4, 3), F(1, 12)), F(16, 3)),
    "lgf6": SplitStencil("lgf6", 6, (F(-3, 2), F(3, 20), F(-1, 90)), F(272, 45)),
    "lgf8": SplitStencil("lgf8", 8, (F(-8, 5), F(1, 5), F(-8, 315), F(1, 560)), F(2048, 315)),
    "meh4": MehrstellenPair(
        "meh4", 4,
        {(0, 0, 0): F(4), (0, 0, 1): F(-1, 3), (0, 1, 1): F(-1, 6)},
        {(0, 0, 0): F(1, 2), (0, 0, 1): F(1, 12)},
    ),
    "meh6": MehrstellenPair(
        "meh6", 6,
        {(0, 0, 0): F(64, 15), (0, 0, 1): F(-7, 15), (0, 1, 1): F(-1, 10),
         (1, 1, 1): F(-1, 30)},
        {(0, 0, 0): F(67, 120), (0, 0, 1): F(1, 18), (0, 0, 2): F(-1, 240),
         (0, 1, 1): F(1, 90)},
    ),
}

SPLIT_IDS = ("lgf2", "lgf4", "lgf6", "lgf8")
MEHR_IDS = ("meh4", "meh6")
STENCIL_IDS = SPLIT_IDS + MEHR_IDS


def get_stencil(name: str):
    try:
        return _REGISTRY[name.lower()]
    except KeyError:
        raise KeyError(f"unknown stencil {name!r}; choose from {', '.join(STENCIL_IDS)}") from None


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def split_symbol(st: SplitStencil, k):
    """``sigma(k) = -4 sum_j a_j sin^2(j k / 2)``; accurate for small ``k``."""
    k = np.asarray(k, dtype=float)
    out = np.zeros_like(k)
    for j, a in enumerate(st.coeffs, start=1):
        out = out - 4.0 * float(a) * np.sin(0.5 * j * k) ** 2
    return out if out.ndim else float(out)


def split_symbol_trig(st: SplitStencil, k):
    """Cosine form ``a_0 + 2 sum_j a_j cos(j k)``; loses digits near ``k = 0``."""
    k = np.asarray(k, dtype=float)
    out = np.full_like(k, float(st.a0))
    for j, a in enumerate(st.coeffs, start=1):
        out = out + 2.0 * float(a) * np.cos(j * k)
    return out if out.ndim else float(out)


def chebyshev_t(m: int) -> RationalPoly:
    t0, t1 = RationalPoly([1]), RationalPoly([0, 1])
    if m == 0:
        return t0
    for _ in range(m - 1):
        t0, t1 = t1, RationalPoly([0, 2]) * t1 - t0
    return t1


def _cos_in_y(m: int) -> RationalPoly:
    # cos(m k) = T_m(1 - 2y) with y = sin^2(k/2)
    return chebyshev_t(m).compose(RationalPoly([1, -2]))


def split_y_poly(st: SplitStencil) -> RationalPoly:
    """``sigma`` as an exact polynomial in ``y = sin^2(k/2)``."""
    out = RationalPoly()
    for j, a in enumerate(st.coeffs, start=1):
        out = out + (_cos_in_y(j) - 1) * (2 * a)
    return out


def q_poly(st: SplitStencil) -> RationalPoly:
    """``q(lambda) = 2 sum_j a_j (T_j(lambda) - 1)``, i.e. ``sigma`` at ``cos k = lambda``."""
    out = RationalPoly()
    for j, a in enumerate(st.coeffs, start=1):
        out = out + (chebyshev_t(j) - 1) * (2 * a)
    return out


def orbit(rep) -> list[tuple[int, ...]]:
    """All distinct sign flips and permutations of an index tuple, sorted."""
    pts = set()
    for perm in permutations(rep):
        for signs in product((1, -1), repeat=len(rep)):
            pts.add(tuple(s * v for s, v in zip(signs, perm)))
    return sorted(pts)


def _expand(coeffs: Mapping) -> list[tuple[tuple[int, int, int], Fraction]]:
    out = []
    for rep, c in sorted(coeffs.items()):
        for off in orbit(rep):
            out.append((off, c))
    return out


def _y_form(coeffs: Mapping, nvars: int = 3) -> MultiPoly:
    cos_polys = {}
    out = MultiPoly(nvars)
    for off, c in _expand(coeffs):
        term = MultiPoly.constant(nvars, c)
        for i, v in enumerate(off[:nvars]):
            m = abs(v)
            if m:
                if m not in cos_polys:
                    cos_polys[m] = _cos_in_y(m)
                term = term * MultiPoly.from_univariate(cos_polys[m], nvars, i)
        out = out + term
    return out


_MEHR_CACHE: dict = {}


def mehr_symbol_polys(mp: MehrstellenPair) -> tuple[MultiPoly, MultiPoly]:
    """Exact y-forms ``(sigma_L(y), sigma_R(y))`` as trivariate polynomials."""
    if mp.name not in _MEHR_CACHE:
        _MEHR_CACHE[mp.name] = (_y_form(mp.lhs), _y_form(mp.rhs))
    return _MEHR_CACHE[mp.name]


def _eval_multi(poly: MultiPoly, y):
    y = [np.asarray(v, dtype=float) for v in y]
    acc = 0.0
    for k, c in sorted(poly.terms.items()):
        term = float(c)
        for v, e in zip(y, k):
            if e:
                term = term * v**e
        acc = acc + term
    return acc


def mehr_symbols(mp: MehrstellenPair, y):
    """Stable ``(sigma_L, sigma_R)`` at ``y_i = sin^2(k_i / 2)``."""
    y = tuple(y)
    if len(y) != 3:
        raise ValueError("y must have three components")
    L, R = mehr_symbol_polys(mp)
    return _eval_multi(L, y), _eval_multi(R, y)


def mehr_symbols_trig(mp: MehrstellenPair, k):
    """Symbols from the plain cosine sum over the expanded stencil."""
    k = [np.asarray(v, dtype=float) for v in k]
    out = []
    for coeffs in (mp.lhs, mp.rhs):
        acc = 0.0
        for off, c in _expand(coeffs):
            term = float(c)
            for kv, v in zip(k, off):
                if v:
                    term = term * np.cos(v * kv)
            acc = acc + term
        out.append(acc)
    return tuple(out)


def axial_mehr_coeffs(mp: MehrstellenPair) -> tuple[dict[int, MultiPoly], dict[int, MultiPoly]]:
    """Coefficients of the 1D reduced scheme along the first axis.

    Returns ``({j: a_j(y2, y3)}, {j: b_j(y2, y3)})`` for ``j >= 0``; the
    negative offsets carry the same coefficients.
    """
    key = mp.name + ":axial"
    if key in _MEHR_CACHE:
        return _MEHR_CACHE[key]
    result = []
    for coeffs in (mp.lhs, mp.rhs):
        buckets: dict[int, MultiPoly] = {}
        for off, c in _expand(coeffs):
            if off[0] < 0:
                continue
            term = MultiPoly.constant(2, c)
            for i, v in enumerate(off[1:]):
                if v:
                    term = term * MultiPoly.from_univariate(_cos_in_y(abs(v)), 2, i)
            buckets[off[0]] = buckets.get(off[0], MultiPoly(2)) + term
        result.append(dict(sorted(buckets.items())))
    _MEHR_CACHE[key] = tuple(result)
    return _MEHR_CACHE[key]


# ---------------------------------------------------------------------------
# operator application
# ---------------------------------------------------------------------------

def operator_entries(stencil, side: str = "L", dim: int = 3) -> list[tuple[tuple[int, ...], Fraction]]:
    """Expanded ``(offset, weight)`` list of ``L`` or ``R``, in a fixed order.

    For split stencils ``R`` is the identity.
    """
    if side not in ("L", "R"):
        raise ValueError("side must be 'L' or 'R'")
    if stencil.is_split:
        if side == "R":
            return [((0,) * dim, F(1))]
        out = [((0,) * dim, stencil.a0 * dim)]
        for axis in range(dim):
            for j, a in enumerate(stencil.coeffs, start=1):
                for s in (-1, 1):
                    off = [0] * dim
                    off[axis] = s * j
                    out.append((tuple(off), a))
        return out
    if dim != 3:
        raise ValueError("Mehrstellen stencils are three-dimensional")
    return _expand(stencil.lhs if side == "L" else stencil.rhs)


def _lookup(field: np.ndarray, idx, policy: str):
    idx = list(idx)
    for ax, (i, n) in enumerate(zip(idx, field.shape)):
        if 0 <= i < n:
            continue
        if policy == "periodic":
            idx[ax] = i % n
        elif policy == "parity":
            # even extension about index 0: u(-m) = u(m)
            if -n < i < 0:
                idx[ax] = -i
            else:
                raise IndexError(f"index {tuple(idx)} outside table coverage")
        elif policy == "halo":
            raise IndexError(f"index {tuple(idx)} outside the supplied field")
        else:
            raise ValueError(f"unknown boundary policy {policy!r}")
    return field[tuple(idx)]


def apply_operator(entries, field: np.ndarray, n, policy: str = "halo") -> float:
    """Apply an expanded operator to ``field`` at lattice index ``n``.

    ``policy`` selects how indices outside the array are read: ``"parity"``
    mirrors about index 0 on every axis, ``"periodic"`` wraps, and ``"halo"``
    raises ``IndexError``.
    """
    acc = 0.0
    for off, w in entries:
        acc += float(w) * float(_lookup(field, [a + b for a, b in zip(n, off)], policy))
    return acc
