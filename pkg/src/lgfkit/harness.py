"""Residual checks, FFT Poisson solvers and manufactured-solution studies."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._kernels import stencil_apply
from .axial import axial_dft_realize, axial_spectrum
from .free3d import IEvaluator, build_table
from .series import build_expansion_pack
from .stencils import get_stencil, mehr_symbols, operator_entries, split_symbol

__all__ = [
    "ResidualReport",
    "DomainSpec",
    "ZeroMeanWarning",
    "apply_field",
    "residual_3unb",
    "residual_1unb",
    "solve_periodic",
    "solve_unbounded",
    "solve_one_unbounded",
    "he_kernel",
    "u_per",
    "u_per_dd",
    "u_unb",
    "u_unb_dd",
    "manufactured",
    "convergence_study",
    "observed_orders",
    "free_table_dense",
]


class ZeroMeanWarning(UserWarning):
    """The right-hand side of a fully periodic problem had a nonzero mean."""


@dataclass(frozen=True)
class ResidualReport:
    R_max: float
    n_res: tuple
    region: tuple

    def to_dict(self) -> dict:
        return {"R_max": self.R_max, "n_res": list(self.n_res),
                "region": [list(r) for r in self.region]}


@dataclass(frozen=True)
class DomainSpec:
    """Cube ``[0, L]^3`` with ``N`` cell-centred points per axis.

    ``bc`` lists ``"periodic"`` or ``"unbounded"`` per axis.
    """

    N: int
    L: float = 1.0
    bc: tuple = ("unbounded", "periodic", "periodic")

    @property
    def h(self) -> float:
        return self.L / self.N

    def coords(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.h


def _stencil(s):
    return get_stencil(s) if isinstance(s, str) else s


def _entries_arrays(entries):
    off = np.array([e[0] for e in entries], dtype=np.int64)
    wt = np.array([float(e[1]) for e in entries])
    return off, wt


def _index_map(lo: int, hi: int, w: int, n: int, policy: str, axis: int) -> np.ndarray:
    idx = np.arange(lo - w, hi + w + 1)
    if policy == "periodic":
        return idx % n
    if policy == "parity":
        m = np.abs(idx)
    elif policy == "halo":
        m = idx
    else:
        raise ValueError(f"unknown boundary policy {policy!r}")
    bad = (m < 0) | (m >= n)
    if bad.any():
        raise IndexError(f"axis {axis}: index {int(idx[np.argmax(bad)])} outside the "
                         f"available range [0, {n - 1}] under policy {policy!r}")
    return m


def apply_field(entries, field: np.ndarray, policies, lo, hi) -> np.ndarray:
    """Apply an expanded operator on the box ``lo <= n <= hi`` (inclusive).

    ``policies`` gives one boundary policy per axis: ``"parity"`` (even
    extension about index 0), ``"periodic"`` or ``"halo"`` (no extension).
    """
    off, wt = _entries_arrays(entries)
    w = np.abs(off).max(axis=0)
    maps = [_index_map(lo[a], hi[a], int(w[a]), field.shape[a], policies[a], a)
            for a in range(3)]
    padded = field[np.ix_(*maps)]
    shape = tuple(hi[a] - lo[a] + 1 for a in range(3))
    return stencil_apply(padded, off, wt, tuple(int(v) for v in w), shape)


def _report(R: np.ndarray, lo) -> ResidualReport:
    a = np.abs(R)
    i = np.unravel_index(int(np.argmax(a)), a.shape)  # first maximum in C order
    n = tuple(int(v + l) for v, l in zip(i, lo))
    region = tuple((int(l), int(l + s - 1)) for l, s in zip(lo, R.shape))
    return ResidualReport(float(a[i]), n, region)


def residual_3unb(field: np.ndarray, stencil, region_hi: int) -> ResidualReport:
    """Max ``|[L G](n) - [R delta](n)|`` for ``n`` in ``[0, region_hi]^3``.

    ``field`` holds ``G`` on ``[0, extent]^3``; negative indices follow from
    parity.  Raises ``IndexError`` if the stencil reaches past the table.
    """
    st = _stencil(stencil)
    lo, hi = (0, 0, 0), (region_hi,) * 3
    pol = ("parity",) * 3
    LG = apply_field(operator_entries(st, "L"), field, pol, lo, hi)
    delta = np.zeros(field.shape)
    delta[0, 0, 0] = 1.0
    Rd = apply_field(operator_entries(st, "R"), delta, pol, lo, hi)
    return _report(LG - Rd, lo)


def residual_1unb(stencil, N: int, small_c_precise: bool = False) -> ResidualReport:
    """Residual of the realized LGF on ``N`` unbounded rows times the ``N x N`` torus."""
    st = _stencil(stencil)
    ent_L = operator_entries(st, "L")
    ent_R = operator_entries(st, "R")
    w = int(max(max(abs(e[0][0]) for e in ent_L), max(abs(e[0][0]) for e in ent_R)))
    G = axial_dft_realize(st, N, N + w, small_c_precise)
    lo, hi = (0, 0, 0), (N - 1, N - 1, N - 1)
    pol = ("parity", "periodic", "periodic")
    LG = apply_field(ent_L, G, pol, lo, hi)
    delta = np.zeros(G.shape)
    delta[0, 0, 0] = 1.0
    Rd = apply_field(ent_R, delta, pol, lo, hi)
    return _report(LG - Rd, lo)


# ---------------------------------------------------------------------------
# Poisson solvers
# ---------------------------------------------------------------------------

def _symbols(st, N: int):
    k = 2 * np.pi * np.fft.fftfreq(N)
    if st.is_split:
        s = split_symbol(st, k)
        sl = s[:, None, None] + s[None, :, None] + s[None, None, :]
        return sl, np.ones_like(sl)
    y = np.sin(0.5 * k) ** 2
    Y = np.meshgrid(y, y, y, indexing="ij")
    sl, sr = mehr_symbols(st, Y)
    return np.asarray(sl), np.asarray(sr)


def solve_periodic(stencil, f: np.ndarray, h: float = 1.0) -> np.ndarray:
    """Fully periodic solve of ``L u = h^2 R f``; the zero mode is set to zero."""
    st = _stencil(stencil)
    N = f.shape[0]
    mean = float(np.mean(f))
    if abs(mean) > 1e-14 * max(1.0, float(np.abs(f).max())):
        warnings.warn(f"right-hand side has mean {mean:.3e}; projecting it out",
                      ZeroMeanWarning, stacklevel=2)
    sl, sr = _symbols(st, N)
    fh = np.fft.fftn(f)
    with np.errstate(divide="ignore", invalid="ignore"):
        uh = fh * sr / sl
    uh[0, 0, 0] = 0.0
    return h * h * np.fft.ifftn(uh).real


def he_kernel(G: np.ndarray, N: int, axes=(0, 1, 2)) -> np.ndarray:
    """Hockney-Eastwood kernel of length ``2N`` on the given axes.

    ``G`` holds samples at non-negative offsets ``0..N-1`` on those axes;
    the kernel is even, so offset ``-m`` is stored at ``2N - m``.
    """
    out = G
    for ax in axes:
        head = np.take(out, np.arange(N), axis=ax)
        tail = np.flip(np.take(out, np.arange(1, N), axis=ax), axis=ax)
        zshape = list(head.shape)
        zshape[ax] = 1
        out = np.concatenate([head, np.zeros(zshape), tail], axis=ax)
    return out


def solve_unbounded(G_dense: np.ndarray, f: np.ndarray, h: float = 1.0) -> np.ndarray:
    """Free-space convolution ``u = h^2 G * f`` by zero padding to ``2N``."""
    N = f.shape[0]
    if any(s < N for s in G_dense.shape):
        raise ValueError(f"kernel covers offsets up to {min(G_dense.shape) - 1}, need {N - 1}")
    K = he_kernel(G_dense[:N, :N, :N], N)
    fp = np.zeros((2 * N,) * 3)
    fp[:N, :N, :N] = f
    u = np.fft.irfftn(np.fft.rfftn(K) * np.fft.rfftn(fp), s=fp.shape, axes=(0, 1, 2))
    return h * h * u[:N, :N, :N]


def solve_one_unbounded(stencil, f: np.ndarray, h: float = 1.0,
                        small_c_precise: bool = False) -> np.ndarray:
    """Axis 0 unbounded, axes 1 and 2 periodic."""
    st = _stencil(stencil)
    N = f.shape[0]
    spec = axial_spectrum(st, f.shape[1], N, small_c_precise)   # (n1, j2, j3)
    K = he_kernel(spec, N, axes=(0,))
    fh = np.fft.fft2(f, axes=(1, 2))
    fp = np.zeros((2 * N,) + f.shape[1:], dtype=complex)
    fp[:N] = fh
    uh = np.fft.ifft(np.fft.fft(K, axis=0) * np.fft.fft(fp, axis=0), axis=0)[:N]
    return h * h * np.fft.ifft2(uh, axes=(1, 2)).real


def free_table_dense(stencil, N: int, threads: int = 1) -> np.ndarray:
    """Dense fully unbounded LGF on ``[0, N-1]^3`` from a freshly built table."""
    st = _stencil(stencil)
    ev = IEvaluator(st, build_expansion_pack(st, n_max=max(N - 1, 1)))
    return build_table(ev, N - 1).dense()


# ---------------------------------------------------------------------------
# manufactured solutions
# ---------------------------------------------------------------------------

def u_per(x, L=1.0):
    return np.exp(np.sin(8 * np.pi * x / L)) - 1


def u_per_dd(x, L=1.0):
    a = 8 * np.pi / L
    s, c = np.sin(a * x), np.cos(a * x)
    return a * a * np.exp(s) * (c * c - s)


def u_unb(x, L=1.0):
    z = 2 * x / L - 1
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        v = np.exp(10 * (1 - 1 / (1 - z * z)))
    return np.where(np.abs(z) < 1, v, 0.0)


def u_unb_dd(x, L=1.0):
    z = 2 * x / L - 1
    inside = np.abs(z) < 1
    zz = np.where(inside, z, 0.0)
    d = 1 - zz * zz
    g = np.exp(10 * (1 - 1 / d))
    # u = exp(phi), phi = 10 (1 - 1/d); d/dz phi = -20 z / d^2
    p1 = -20 * zz / d**2
    p2 = -20 / d**2 - 80 * zz * zz / d**3
    val = g * (p1 * p1 + p2) * (2 / L) ** 2
    return np.where(inside, val, 0.0)


def manufactured(domain: DomainSpec):
    """Exact ``u`` and ``f = -Laplacian u`` on the cell-centred grid."""
    x = domain.coords()
    parts, dd = [], []
    for bc in domain.bc:
        if bc == "periodic":
            parts.append(u_per(x, domain.L))
            dd.append(u_per_dd(x, domain.L))
        elif bc == "unbounded":
            parts.append(u_unb(x, domain.L))
            dd.append(u_unb_dd(x, domain.L))
        else:
            raise ValueError(f"unknown boundary condition {bc!r}")
    u = np.einsum("i,j,k->ijk", *parts)
    f = -(np.einsum("i,j,k->ijk", dd[0], parts[1], parts[2])
          + np.einsum("i,j,k->ijk", parts[0], dd[1], parts[2])
          + np.einsum("i,j,k->ijk", parts[0], parts[1], dd[2]))
    return u, f


def observed_orders(errors) -> list:
    return [math.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]


def convergence_study(stencils, domain_type: str, Ns, L: float = 1.0):
    """Rows ``(stencil, N, eps_inf, order)``; ``order`` is None on the first row.

    ``domain_type`` is ``"one_unbounded"`` (axis 0 unbounded) or
    ``"unbounded"`` (all axes).
    """
    Ns = list(Ns)
    if sorted(Ns) != Ns:
        raise ValueError("N list must be ascending")
    rows = []
    for name in stencils:
        st = _stencil(name)
        errs = []
        for N in Ns:
            if domain_type == "one_unbounded":
                dom = DomainSpec(N, L, ("unbounded", "periodic", "periodic"))
                u, f = manufactured(dom)
                uh = solve_one_unbounded(st, f, dom.h)
            elif domain_type == "unbounded":
                if not st.is_split:
                    raise ValueError("fully unbounded studies need a split stencil")
                dom = DomainSpec(N, L, ("unbounded",) * 3)
                u, f = manufactured(dom)
                uh = solve_unbounded(free_table_dense(st, N), f, dom.h)
            else:
                raise ValueError(f"unknown domain type {domain_type!r}")
            errs.append(float(np.abs(uh - u).max()))
        orders = [None] + observed_orders(errs)
        rows += [(st.name, N, e, o) for N, e, o in zip(Ns, errs, orders)]
    return rows
