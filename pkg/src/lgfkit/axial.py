"""LGFs with one unbounded direction, in closed form.

After a Fourier transform along the two periodic axes, every mode solves a
1D difference equation along the unbounded axis.  For a split stencil the
mode enters through ``c = sigma(k2) + sigma(k3)`` and

    sigma(k1) + c = q(lambda) + c,   lambda = cos(k1),

so the poles of the 1D transform follow from the ``w`` roots of
``q(lambda) + c``.  Each root gives ``r = lambda - sqrt(lambda-1) sqrt(lambda+1)``
inside the unit disk, and ``G(n) = sum_i w_i r_i^|n|``.

Mehrstellen stencils have ``w_L = 1``: the reduced operator is
``a0 u(n) + a1 (u(n+1) + u(n-1))`` and the right-hand side is a short
symmetric convolution, so ``G = b * H`` with ``H(n) = C r^|n|``.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .quadrature import contour_derivatives, integrate_1d
from .series import RationalPoly, revert_series
from .stencils import (MehrstellenPair, SplitStencil, axial_mehr_coeffs, get_stencil,
                       mehr_symbol_polys, q_poly, split_symbol, split_y_poly)

__all__ = [
    "SMALL_C",
    "TAYLOR_WINDOW",
    "FACTOR_WINDOW",
    "RootSet",
    "TaylorPack",
    "SplitAxialKernel",
    "MehrAxialKernel",
    "axial_kernel",
    "q_roots_split",
    "axial_eval_split",
    "axial_eval_mehr",
    "locate_c_star",
    "derive_taylor_pack",
    "axial_reference",
    "mode_parameters",
    "axial_spectrum",
    "axial_dft_realize",
]

SMALL_C = 1e-3
TAYLOR_WINDOW = 1e-5
FACTOR_WINDOW = 0.25
_REPEATED = ("lgf4", "lgf8")


# ---------------------------------------------------------------------------
# polynomial helpers (ascending float coefficients)
# ---------------------------------------------------------------------------

def _horner(c, x):
    acc = 0.0 * x
    for v in reversed(c):
        acc = acc * x + v
    return acc


def _deriv(c):
    return [i * v for i, v in enumerate(c)][1:]


def _cubic_roots(c):
    # c0 + c1 x + c2 x^2 + c3 x^3, Cardano on the depressed cubic
    a, b, cc = c[2] / c[3], c[1] / c[3], c[0] / c[3]
    p = b - a * a / 3
    q = 2 * a**3 / 27 - a * b / 3 + cc
    disc = cmath.sqrt(q * q / 4 + p**3 / 27)
    u = (-q / 2 + disc) ** (1 / 3) if abs(-q / 2 + disc) >= abs(-q / 2 - disc) \
        else (-q / 2 - disc) ** (1 / 3)
    w = complex(-0.5, math.sqrt(3) / 2)
    out = []
    for k in range(3):
        uk = u * w**k
        vk = -p / (3 * uk) if uk != 0 else 0.0
        out.append(uk + vk - a / 3)
    return out


def _quartic_roots(c):
    # Ferrari: depressed quartic y^4 + p y^2 + q y + r via the resolvent cubic
    a3, a2, a1, a0 = c[3] / c[4], c[2] / c[4], c[1] / c[4], c[0] / c[4]
    s = a3 / 4
    p = a2 - 6 * s * s
    q = a1 - 2 * a2 * s + 8 * s**3
    r = a0 - a1 * s + a2 * s * s - 3 * s**4
    ms = _cubic_roots([-q * q / 8, p * p / 4 - r, p, 1.0])
    m = max(ms, key=abs)
    out = []
    if abs(m) < 1e-300:
        for sgn in (1, -1):
            y2 = (-p + sgn * cmath.sqrt(p * p - 4 * r)) / 2
            out += [cmath.sqrt(y2), -cmath.sqrt(y2)]
    else:
        root2m = cmath.sqrt(2 * m)
        for sgn in (1, -1):
            # y^2 - sgn*sqrt(2m) y + (p/2 + m + sgn*q/(2 sqrt(2m))) = 0
            bq = -sgn * root2m
            cq = p / 2 + m + sgn * q / (2 * root2m)
            d = cmath.sqrt(bq * bq - 4 * cq)
            out += [(-bq + d) / 2, (-bq - d) / 2]
    return [y - s for y in out]


def _aberth(c, z, iters: int = 60):
    z = [complex(v) for v in z]
    dc = _deriv(c)
    for _ in range(iters):
        moved = 0.0
        new = list(z)
        for i, zi in enumerate(z):
            pv = _horner(c, zi)
            dv = _horner(dc, zi)
            if pv == 0:
                continue
            ratio = pv / dv if dv != 0 else 0.0
            acc = sum(1 / (zi - zj) for j, zj in enumerate(z) if j != i and zi != zj)
            den = 1 - ratio * acc
            step = ratio / den if den != 0 else ratio
            new[i] = zi - step
            moved = max(moved, abs(step) / max(abs(zi), 1e-300))
        z = new
        if moved < 1e-17:
            break
    return z


def _closed_form_roots(c):
    deg = len(c) - 1
    if deg == 1:
        return [complex(-c[0] / c[1])]
    if deg == 2:
        d = cmath.sqrt(c[1] ** 2 - 4 * c[0] * c[2])
        return [(-c[1] + d) / (2 * c[2]), (-c[1] - d) / (2 * c[2])]
    if deg == 3:
        return _cubic_roots(c)
    if deg == 4:
        return _quartic_roots(c)
    raise ValueError("closed forms exist up to degree four")


def _lambda_to_r(lam: complex):
    s = cmath.sqrt(lam - 1) * cmath.sqrt(lam + 1)
    r = 1 / (lam + s)
    if abs(r) > 1 + 1e-12:
        r = lam - s
    return s, r


def _pow_list(r: complex, n: np.ndarray) -> np.ndarray:
    return np.array([r**int(k) for k in n], dtype=complex)


# ---------------------------------------------------------------------------
# split stencils
# ---------------------------------------------------------------------------

@dataclass
class RootSet:
    """Roots of ``q(lambda) + c`` and the matching unit-disk roots ``r``."""

    c: float
    lambdas: list
    roots: list
    s: list
    weights: list
    classification: str
    unity_index: int | None = None
    mu: float | None = None
    rho: float | None = None
    theta: float | None = None


@dataclass
class TaylorPack:
    """Derivatives ``d^j G / dc^j`` at the repeated-root parameter ``c*``.

    ``G^(j)(n) = r0^n A_j(n) + rho^n (cos(n theta) U_j(n) + sin(n theta) V_j(n))``
    with polynomial coefficients ascending in ``n``.
    """

    stencil: str
    c_star: float
    r_bar: float
    rho: float | None
    theta: float | None
    a: list
    u: list
    v: list
    note: str = "derived via contour residues"

    @property
    def orders(self) -> int:
        return len(self.a)

    def derivative(self, j: int, n) -> np.ndarray:
        n = np.abs(np.asarray(n, dtype=float))
        out = self.r_bar**n * _horner(self.a[j], n)
        if self.rho is not None:
            out = out + self.rho**n * (np.cos(n * self.theta) * _horner(self.u[j], n)
                                       + np.sin(n * self.theta) * _horner(self.v[j], n))
        return out

    def evaluate(self, n, c: float) -> np.ndarray:
        d = c - self.c_star
        acc = 0.0
        for j in range(self.orders):
            acc = acc + d**j / math.factorial(j) * self.derivative(j, n)
        return acc

    def to_json(self) -> str:
        def fmt(rows):
            return [[repr(float(x)) for x in row] for row in rows]
        return json.dumps({"stencil": self.stencil, "c_star": repr(self.c_star),
                           "r_bar": repr(self.r_bar),
                           "rho": None if self.rho is None else repr(self.rho),
                           "theta": None if self.theta is None else repr(self.theta),
                           "a": fmt(self.a), "u": fmt(self.u), "v": fmt(self.v),
                           "note": self.note}, indent=1, sort_keys=True)


def _falling_poly(K: int, l: int) -> list:
    """Ascending coefficients in ``n`` of ``(n+K)(n+K-1)...(n+K-l+1) / l!``."""
    p = RationalPoly([1])
    for i in range(l):
        p = p * RationalPoly([K - i, 1])
    p = p * Fraction(1, math.factorial(l))
    return [float(x) for x in p.coeffs] or [0.0]


class SplitAxialKernel:
    """Closed-form 1D LGF of ``sigma(k1) + c`` for one split stencil."""

    def __init__(self, stencil: SplitStencil | str, small_c_precise: bool = False,
                 taylor_orders: int = 4):
        if isinstance(stencil, str):
            stencil = get_stencil(stencil)
        if not stencil.is_split:
            raise ValueError("expected a split stencil")
        self.stencil = stencil
        self.w = stencil.width
        self.small_c_precise = small_c_precise
        self.q = q_poly(stencil)
        self.qc = [float(x) for x in self.q.coeffs]
        self.dqc = _deriv(self.qc)
        shifted = self.q.shift(1)
        self.mu_c = [float(x) for x in shifted.coeffs]
        self.dmu_c = _deriv(self.mu_c)
        self.mu_series = [float(x) for x in revert_series(shifted.coeffs, 6)]
        self.c_max = 2 * float(stencil.sigma_max)
        self.c_star = locate_c_star(stencil) if stencil.name in _REPEATED else None
        self._taylor = None
        self._taylor_orders = taylor_orders

    @property
    def taylor(self) -> TaylorPack:
        if self._taylor is None:
            self._taylor = derive_taylor_pack(self.stencil, self._taylor_orders)
        return self._taylor

    # -- roots ---------------------------------------------------------------
    def _near_unity_mu(self, c: float, guess: float) -> float:
        # Newton on q(1 + mu) + c, expanded exactly about lambda = 1
        coeffs = [c + self.mu_c[0]] + self.mu_c[1:]
        mu = guess
        for _ in range(50):
            f = _horner(coeffs, mu)
            step = f / _horner(self.dmu_c, mu)
            mu -= step
            if abs(step) <= 1e-17 * abs(mu):
                break
        return mu

    def roots(self, c: float, series_guess: bool | None = None) -> RootSet:
        """Roots at ``c``; ``series_guess`` overrides the small-c starting point."""
        c = float(c)
        if not (-1e-14 <= c <= self.c_max * (1 + 1e-12)):
            raise ValueError(f"c = {c} outside [0, {self.c_max}]")
        c = max(c, 0.0)
        coeffs = [self.qc[0] + c] + self.qc[1:]
        if self.w == 2:
            d = cmath.sqrt(9 - 3 * c)
            lams = [4 - d, 4 + d]
        else:
            lams = _aberth(coeffs, _closed_form_roots(coeffs))
        # the root that tends to 1 as c -> 0 is real and closest to 1
        ui = min(range(len(lams)), key=lambda i: abs(lams[i] - 1))
        mu = None
        if abs(lams[ui].imag) < 1e-9 and abs(lams[ui] - 1) < 0.5:
            if series_guess if series_guess is not None else c < SMALL_C:
                guess = _horner([0.0] + self.mu_series[1:], -c)  # q(1 + mu) = -c
            else:
                guess = lams[ui].real - 1
            mu = self._near_unity_mu(c, guess) if c > 0 else 0.0
            lams[ui] = complex(1 + mu)
        else:
            ui = None
        ss, rs, ws = [], [], []
        for i, lam in enumerate(lams):
            if i == ui:
                s = math.sqrt(mu) * math.sqrt(mu + 2)
                r = 1 / (1 + mu + s)
                dq = _horner(self.dmu_c, mu)
            else:
                s, r = _lambda_to_r(lam)
                dq = _horner(self.dqc, lam)
            ss.append(s)
            rs.append(r)
            # undefined exactly at a repeated root; eval never uses weights there
            ws.append(-1 / (dq * s) if dq * s != 0 else complex(math.inf))
        cplx = [lam for lam in lams if abs(lam.imag) > 1e-10 * max(1, abs(lam))]
        rho = theta = None
        if c == 0:
            cls = "zero_c"
        elif c < SMALL_C:
            cls = "near_unity"
        elif self.c_star is not None and abs(c - self.c_star) < FACTOR_WINDOW:
            cls = "near_repeated"
        elif cplx:
            cls = "conjugate_pairs"
        else:
            cls = "all_real_distinct"
        if cplx:
            rc = [r for r, lam in zip(rs, lams) if abs(lam.imag) > 1e-10 * max(1, abs(lam))]
            top = max(rc, key=lambda z: (abs(z), z.imag))
            rho, theta = abs(top), abs(cmath.phase(top))
        return RootSet(c, lams, rs, ss, ws, cls, ui, mu, rho, theta)

    # -- evaluation ----------------------------------------------------------
    def _rpow(self, rs: RootSet, i: int, n: np.ndarray) -> np.ndarray:
        r = rs.roots[i]
        if i == rs.unity_index and self.small_c_precise:
            rm1 = rs.mu - rs.s[i]
            return np.exp(n * math.log1p(rm1)).astype(complex)
        return _pow_list(r, n)

    def regime(self, c: float) -> str:
        if c == 0:
            return "zero_c"
        if self.c_star is not None:
            if abs(c - self.c_star) < TAYLOR_WINDOW:
                return "taylor"
            if abs(c - self.c_star) < FACTOR_WINDOW:
                return "factorized"
        if c < SMALL_C:
            return "near_unity"
        return "residues"

    def eval(self, n, c: float, regime: str | None = None) -> np.ndarray:
        """``G(n; c)`` for an array of ``n``; ``regime`` forces a specific path."""
        n = np.abs(np.atleast_1d(np.asarray(n, dtype=np.int64)))
        c = float(c)
        regime = regime or self.regime(c)
        if regime == "taylor":
            return np.asarray(self.taylor.evaluate(n, c), dtype=float)
        rs = self.roots(c, series_guess=regime == "near_unity")
        if regime == "zero_c":
            if c != 0:
                raise ValueError("relative form needs c = 0")
            out = -0.5 * n.astype(complex)
            for i in range(len(rs.roots)):
                if i != rs.unity_index:
                    out += rs.weights[i] * (self._rpow(rs, i, n) - 1)
            return out.real
        skip = ()
        out = np.zeros(n.shape, dtype=complex)
        if regime == "factorized":
            pair = self._closest_pair(rs)
            skip = pair
            out += self._divided_difference(rs, pair, n)
        for i in range(len(rs.roots)):
            if i not in skip:
                out += rs.weights[i] * self._rpow(rs, i, n)
        return out.real

    @staticmethod
    def _closest_pair(rs: RootSet):
        best = None
        m = len(rs.roots)
        for i in range(m):
            for j in range(i + 1, m):
                d = abs(rs.roots[i] - rs.roots[j])
                if best is None or d < best[0]:
                    best = (d, i, j)
        return best[1], best[2]

    def _divided_difference(self, rs: RootSet, pair, n: np.ndarray) -> np.ndarray:
        """Residues at two nearby roots combined as a divided difference.

        The integrand is ``z^(n+w-1) h(z)`` with ``h = 1 / (a_w prod (z - zeta))``
        over the remaining zeros.  Both factors are differenced with the
        product rule so that no cancellation between the two residues occurs.
        """
        r1, r2 = rs.roots[pair[0]], rs.roots[pair[1]]
        others = [rs.roots[i] for i in range(len(rs.roots)) if i not in pair]
        zetas = others + [1 / r for r in rs.roots]
        aw = float(self.stencil.coeffs[-1])
        h1 = 1 / aw
        h2 = 1 / aw
        dh = 0.0
        for zeta in zetas:
            k1, k2 = 1 / (r1 - zeta), 1 / (r2 - zeta)
            # DD[h * k] = DD[h] k(r1) + h(r2) DD[k], DD[k] = -k(r1) k(r2)
            dh = dh * k1 + h2 * (-k1 * k2)
            h1 *= k1
            h2 *= k2
        out = np.empty(n.shape, dtype=complex)
        for idx, nv in enumerate(n):
            m = int(nv) + self.w - 1
            g2 = r2**m
            out[idx] = _dd_power(r1, r2, m) * h1 + g2 * dh
        return out


def _dd_power(r1: complex, r2: complex, m: int) -> complex:
    """``(r1^m - r2^m) / (r1 - r2)`` without cancellation for nearby roots."""
    if m == 0:
        return 0.0
    if abs(r1 - r2) > 0.25 * max(abs(r1), abs(r2)):
        return (r1**m - r2**m) / (r1 - r2)
    q = r1 / r2

    def geo(k):
        # sum_{i<k} q^i by binary splitting
        if k == 1:
            return 1.0
        if k % 2:
            return 1 + q * geo(k - 1)
        return geo(k // 2) * (1 + q ** (k // 2))

    return r2 ** (m - 1) * geo(m)


def locate_c_star(stencil) -> float:
    """Parameter at which two roots of ``q + c`` coincide (LGF4 and LGF8 only)."""
    if isinstance(stencil, str):
        stencil = get_stencil(stencil)
    if not stencil.is_split or stencil.name not in _REPEATED:
        raise ValueError(f"{stencil.name}: no repeated root")
    if stencil.name == "lgf4":
        return 3.0
    # real root of the discriminant cubic, by bisection
    cub = [1968941520.0, -879221700.0, 223915104.0, -44089920.0]
    lo, hi = 3.0, 3.5
    flo = _horner(cub, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = _horner(cub, mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _double_lambda(stencil: SplitStencil) -> float:
    # Newton on q'(lambda) = 0 near the double root
    dq = [float(x) for x in q_poly(stencil).derivative().coeffs]
    ddq = _deriv(dq)
    lam = 4.0 if stencil.name == "lgf4" else 3.6
    for _ in range(60):
        step = _horner(dq, lam) / _horner(ddq, lam)
        lam -= step
        if abs(step) < 1e-16 * abs(lam):
            break
    return lam


def derive_taylor_pack(stencil, orders: int = 4, points: int = 256) -> TaylorPack:
    """Derivatives of ``G(n; c)`` in ``c`` at ``c*``, as closed polynomials in ``n``.

    ``d^j/dc^j`` of ``1/P(z; c)`` is ``(-1)^j j! z^(w j) / P^(j+1)``, so each
    derivative is a sum of residues at poles of order ``j+1`` (the pair)
    or ``2(j+1)`` (the repeated root).  The local Taylor data of the
    regular factor at each pole comes from ``contour_derivatives``.
    """
    if isinstance(stencil, str):
        stencil = get_stencil(stencil)
    c_star = locate_c_star(stencil)
    w = stencil.width
    aw = float(stencil.coeffs[-1])
    lam0 = 4.0 if stencil.name == "lgf4" else _double_lambda(stencil)
    r0 = _lambda_to_r(complex(lam0))[1].real
    # remaining lambda roots: deflate (lambda - lam0)^2 from q + c*
    qc = [float(x) for x in q_poly(stencil).coeffs]
    qc[0] += c_star
    rest = []
    if w > 2:
        quot = np.polydiv(qc[::-1], np.poly([lam0, lam0]))[0][::-1]
        rest = _closed_form_roots(list(quot))
    pair_r = [_lambda_to_r(complex(lam))[1] for lam in rest]
    inner = [r0, r0] + pair_r
    zeros = inner + [1 / z for z in inner]

    def residue_poly(pole, mult_pole, j):
        M = mult_pole * (j + 1)
        others = list(zeros)
        for _ in range(mult_pole):
            others.remove(pole)
        # regular factor phi(z) = (z - pole)^M / P^(j+1)
        rad = 0.5 * min(abs(pole - z) for z in others)

        def phi(z):
            acc = np.full(np.shape(z), 1 / aw, dtype=complex)
            for zeta in others:
                acc = acc / (z - zeta)
            return acc ** (j + 1)

        # normalize so the pole-on-contour guard sees an O(1) integrand
        scale = complex(phi(np.array([complex(pole)]))[0])
        taylor = [t * scale for t in
                  contour_derivatives(lambda z: phi(z) / scale, complex(pole), rad, M, points)]
        K = w - 1 + w * j
        poly = np.zeros(M, dtype=complex)
        for l in range(M):
            coef = complex(pole) ** (K - l) * taylor[M - 1 - l]
            fp = _falling_poly(K, l)
            poly[: len(fp)] += coef * np.array(fp)
        return poly * ((-1) ** j * math.factorial(j))

    a, u, v = [], [], []
    top = pair_r[0] if pair_r else None
    if top is not None and top.imag < 0:
        top = top.conjugate()
    for j in range(orders):
        a.append(list(residue_poly(r0, 2, j).real))
        if top is not None:
            p = residue_poly(top, 1, j)
            u.append(list(2 * p.real))
            v.append(list(-2 * p.imag))
        else:
            u.append([0.0])
            v.append([0.0])
    rho = abs(top) if top is not None else None
    theta = cmath.phase(top) if top is not None else None
    return TaylorPack(stencil.name, c_star, r0, rho, theta, a, u, v)


def q_roots_split(stencil, c: float) -> RootSet:
    return SplitAxialKernel(stencil).roots(c)


# ---------------------------------------------------------------------------
# Mehrstellen stencils
# ---------------------------------------------------------------------------

class MehrAxialKernel:
    """``G = sum_j b_|j|(y) H(n - j)`` with ``a0 H(n) + a1 (H(n+1) + H(n-1)) = delta``."""

    def __init__(self, pair: MehrstellenPair | str):
        if isinstance(pair, str):
            pair = get_stencil(pair)
        if pair.is_split:
            raise ValueError("expected a Mehrstellen pair")
        if pair.w_L != 1:
            raise ValueError("only stencils with w_L = 1 are supported")
        self.pair = pair
        a, b = axial_mehr_coeffs(pair)
        self.a0, self.a1 = a[0], a[1]
        self.b = [b[j] for j in range(len(b))]
        L, _ = mehr_symbol_polys(pair)
        # a0 + 2 a1 = sigma_L(y1 = 0, y2, y3), exact and free of cancellation
        sub = L.substitute(0, 0)
        self.sig0 = _restrict(sub)

    def parts(self, y2: float, y3: float):
        a0 = float(self.a0(y2, y3))
        a1 = float(self.a1(y2, y3))
        b = [float(p(y2, y3)) for p in self.b]
        one_minus_u = float(self.sig0(y2, y3)) / a0
        return a0, a1, b, one_minus_u

    def H(self, n: np.ndarray, y2: float, y3: float) -> np.ndarray:
        a0, a1, _, omu = self.parts(y2, y3)
        n = np.abs(n)
        if omu == 0.0:
            return -0.5 * n.astype(float)
        u = 1 - omu
        root = math.sqrt(omu * (1 + u))  # sqrt(1 - u^2)
        pref = 1 / (a0 * root)
        if a1 == 0.0:
            return np.where(n == 0, pref, 0.0)
        r = u / (1 + root)
        if r > 0.5:
            one_minus_r = (omu + root) / (1 + root)
            return pref * np.exp(n * math.log1p(-one_minus_r))
        return pref * np.array([r ** int(k) for k in n])

    def eval(self, n, y2: float, y3: float) -> np.ndarray:
        n = np.abs(np.atleast_1d(np.asarray(n, dtype=np.int64)))
        if not (0 <= y2 <= 1 and 0 <= y3 <= 1):
            raise ValueError("y2, y3 must lie in [0, 1]")
        _, _, b, _ = self.parts(y2, y3)
        wr = len(b) - 1
        out = np.zeros(n.shape)
        for j in range(-wr, wr + 1):
            out = out + b[abs(j)] * self.H(n - j, y2, y3)
        return out


def _restrict(poly):
    """Drop the first variable of a trivariate polynomial that no longer uses it."""
    from .series import MultiPoly
    return MultiPoly(2, {k[1:]: v for k, v in poly.terms.items()})


# ---------------------------------------------------------------------------
# public wrappers
# ---------------------------------------------------------------------------

_KERNELS: dict = {}


def axial_kernel(stencil, small_c_precise: bool = False):
    name = stencil if isinstance(stencil, str) else stencil.name
    key = (name, small_c_precise)
    if key not in _KERNELS:
        st = get_stencil(name)
        _KERNELS[key] = SplitAxialKernel(st, small_c_precise) if st.is_split \
            else MehrAxialKernel(st)
    return _KERNELS[key]


def axial_eval_split(stencil, n, c: float, small_c_precise: bool = False) -> float:
    return float(axial_kernel(stencil, small_c_precise).eval([n], c)[0])


def axial_eval_mehr(stencil, n, y2: float, y3: float) -> float:
    return float(axial_kernel(stencil).eval([n], y2, y3)[0])


def axial_reference(stencil, n: int, param, eps: float = 1e-13) -> float:
    """Adaptive quadrature of ``(1/pi) int_0^pi cos(n k) sigma_R / sigma_L dk``.

    ``param`` is ``c`` for split stencils and ``(y2, y3)`` for Mehrstellen
    pairs.  At ``c = 0`` / ``y = 0`` the constant ``H(0)`` is removed, which
    matches the relative forms of the closed-form evaluators.
    """
    st = get_stencil(stencil) if isinstance(stencil, str) else stencil
    n = abs(int(n))
    if st.is_split:
        c = float(param)
        ypoly = [float(x) for x in split_y_poly(st).coeffs]

        def f(k):
            y = np.sin(0.5 * k) ** 2
            den = _horner(ypoly, y) + c
            if c == 0:
                return -2 * np.sin(0.5 * n * k) ** 2 / den / np.pi
            return np.cos(n * k) / den / np.pi
    else:
        y2, y3 = param
        L, R = mehr_symbol_polys(st)
        Rm1 = R - 1
        relative = (y2 == 0 and y3 == 0)

        def f(k):
            y1 = np.sin(0.5 * k) ** 2
            den = _eval3(L, y1, y2, y3)
            if relative:
                num = -2 * np.sin(0.5 * n * k) ** 2 * _eval3(R, y1, y2, y3) \
                    + _eval3(Rm1, y1, y2, y3)
            else:
                num = np.cos(n * k) * _eval3(R, y1, y2, y3)
            return num / den / np.pi
    return integrate_1d(f, 0.0, np.pi, eps, eps, max_subdivisions=5000).value


def _eval3(poly, y1, y2, y3):
    acc = 0.0
    for k, cf in sorted(poly.terms.items()):
        acc = acc + float(cf) * y1 ** k[0] * y2 ** k[1] * y3 ** k[2]
    return acc


# ---------------------------------------------------------------------------
# realization on a periodic x periodic x unbounded grid
# ---------------------------------------------------------------------------

def mode_parameters(stencil, N: int) -> np.ndarray:
    """Per-mode parameter: ``c`` (shape ``N x N``) or ``(y2, y3)`` (``N x N x 2``)."""
    st = get_stencil(stencil) if isinstance(stencil, str) else stencil
    k = 2 * np.pi * np.arange(N) / N
    if st.is_split:
        s = split_symbol(st, k)
        return s[:, None] + s[None, :]
    y = np.sin(0.5 * k) ** 2
    return np.stack(np.broadcast_arrays(y[:, None], y[None, :]), axis=-1)


def axial_spectrum(stencil, N: int, n_count: int, small_c_precise: bool = False) -> np.ndarray:
    """``G(n1; k2, k3)`` for ``n1 = 0..n_count-1`` on the ``N x N`` mode grid.

    Only one representative per symmetry class ``(j, N-j)`` and swap is
    evaluated; the rest is filled by copying.
    """
    st = get_stencil(stencil) if isinstance(stencil, str) else stencil
    ker = axial_kernel(st, small_c_precise)
    params = mode_parameters(st, N)
    n = np.arange(n_count)
    out = np.empty((n_count, N, N))
    half = N // 2
    for j2 in range(half + 1):
        for j3 in range(j2, half + 1):
            if st.is_split:
                col = ker.eval(n, float(params[j2, j3]))
            else:
                col = ker.eval(n, float(params[j2, j3, 0]), float(params[j2, j3, 1]))
            for a in {j2, (N - j2) % N}:
                for b in {j3, (N - j3) % N}:
                    out[:, a, b] = col
                    out[:, b, a] = col
    return out


def axial_dft_realize(stencil, N: int, n_count: int | None = None,
                      small_c_precise: bool = False, return_imag: bool = False):
    """Real-space LGF on ``n1 = 0..n_count-1`` (default ``N``) times the ``N x N`` torus."""
    n_count = N if n_count is None else n_count
    spec = axial_spectrum(stencil, N, n_count, small_c_precise)
    j = np.arange(N)
    # reduce j*k mod N first so the cosine argument stays in [0, 2 pi)
    C = np.cos(2 * np.pi * (np.outer(j, j) % N) / N)
    out = np.einsum("ab,nbc,dc->nad", C, spec, C, optimize=True) / (N * N)
    if return_imag:
        imag = np.fft.ifft2(spec, axes=(1, 2)).imag
        return out, float(np.abs(imag).max())
    return out
