"""Verification suites shared by the command line and the test-suite.

Every suite returns a report dictionary with a ``checks`` list.  Each check
has a ``name``, the measured ``value``, its ``threshold`` and ``passed``.
Reports contain no timings, so a fixed seed gives byte-identical JSON.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .axial import (FACTOR_WINDOW, SMALL_C, TAYLOR_WINDOW, axial_kernel, axial_reference)
from .free3d import IEvaluator, build_table
from .harness import convergence_study, residual_1unb, residual_3unb
from .series import build_expansion_pack
from .stencils import SPLIT_IDS, STENCIL_IDS, axial_mehr_coeffs, get_stencil

__all__ = ["SUITES", "run_suite", "report_json", "residual3", "residual1", "seams",
           "oracle", "convergence", "recurrence_residual", "RESIDUAL1_LIMITS"]

RESIDUAL1_LIMITS = {"lgf2": 5e-15, "lgf4": 5e-15, "lgf6": 5e-15, "lgf8": 5e-15,
                    "meh4": 1.5e-13, "meh6": 2e-14}


def _check(name, value, threshold, passed=None, **extra):
    value = float(value)
    ok = bool(value <= threshold) if passed is None else bool(passed)
    out = {"name": name, "value": value, "threshold": float(threshold), "passed": ok}
    out.update(extra)
    return out


def _finish(suite, checks, **meta):
    return {"suite": suite, "passed": all(c["passed"] for c in checks),
            "checks": checks, **meta}


def report_json(report) -> str:
    return json.dumps(report, indent=1, sort_keys=True)


# ---------------------------------------------------------------------------

def residual3(stencils=SPLIT_IDS, extent: int = 22, region: int = 16, eps: float = 1e-15,
              J: int = 10, threshold: float = 5e-14):
    checks = []
    for name in stencils:
        st = get_stencil(name)
        ev = IEvaluator(st, build_expansion_pack(st, J=J, n_max=extent, eps_a=eps, eps_r=eps))
        table = build_table(ev, extent)
        rep = residual_3unb(table.dense(), st, region)
        checks.append(_check(f"{name} residual over [0,{region}]^3", rep.R_max, threshold,
                             n_res=list(rep.n_res), evaluations=table.evaluations))
    return _finish("residual3", checks, extent=extent, region=region)


def residual1(Ns=(30, 56), stencils=STENCIL_IDS, limits=None):
    limits = dict(RESIDUAL1_LIMITS, **(limits or {}))
    checks = []
    for N in Ns:
        for name in stencils:
            rep = residual_1unb(name, N)
            checks.append(_check(f"{name} N={N}", rep.R_max, limits[name],
                                 n_res=list(rep.n_res)))
    return _finish("residual1", checks, Ns=list(Ns))


# ---------------------------------------------------------------------------

def _mixed_diff(a, b):
    """``|a - b|`` scaled by ``max(1, |a|)``: absolute for small values, relative for large."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))


def recurrence_residual(stencil, param, n_hi: int = 60, scaled: bool = False) -> float:
    """Max over ``0 <= n <= n_hi`` of the 1D difference equation residual.

    With ``scaled`` the residual is divided by ``max(1, max |G|)``; rounding
    alone leaves about ``eps * |G|`` once ``G`` grows large as ``c -> 0``.
    """
    st = get_stencil(stencil) if isinstance(stencil, str) else stencil
    ker = axial_kernel(st)
    if st.is_split:
        c = float(param)
        w = st.width
        n = np.arange(-w, n_hi + w + 1)
        G = ker.eval(n, c)
        a = [float(st.a0) + c] + [float(x) for x in st.coeffs]
        rhs = {0: 1.0}
    else:
        y2, y3 = param
        A, B = axial_mehr_coeffs(st)
        w = max(B)
        n = np.arange(-w, n_hi + w + 1)
        G = ker.eval(n, y2, y3)
        a = [float(A[j](y2, y3)) for j in range(len(A))]
        rhs = {j: float(B[j](y2, y3)) for j in B}
    off = int(w)
    res = []
    for m in range(0, n_hi + 1):
        acc = a[0] * G[m + off]
        for j in range(1, len(a)):
            acc += a[j] * (G[m + off + j] + G[m + off - j])
        res.append(abs(acc - rhs.get(m, 0.0)))
    scale = max(1.0, float(np.abs(G).max())) if scaled else 1.0
    return max(res) / scale


def _recurrence_params(name):
    st = get_stencil(name)
    if st.is_split:
        cmax = 2 * float(st.sigma_max)
        ps = [0.0, 1e-7, 0.5 * SMALL_C, SMALL_C, 0.3, 1.7, 0.6 * cmax, cmax]
        if name in ("lgf4", "lgf8"):
            cs = axial_kernel(name).c_star
            ps += [cs, cs + 0.5 * TAYLOR_WINDOW, cs - 3 * TAYLOR_WINDOW,
                   cs + 0.1, cs - 0.1]
        return ps
    ps = [(0.0, 0.0), (1e-9, 0.0), (1e-4, 2e-4), (0.37, 0.81), (1.0, 1.0), (0.5, 0.0)]
    if name == "meh4":
        ps.append((0.75, 0.75))
    return ps


def seams(n_hi: int = 100, tol: float = 1e-12, recurrence_tol: float = 1e-13):
    checks = []
    n = np.arange(n_hi + 1)
    # small-c seam: series starting point vs closed-form starting point
    for name in SPLIT_IDS:
        ker = axial_kernel(name)
        for c in (SMALL_C * (1 - 1e-12), SMALL_C, SMALL_C * (1 + 1e-12)):
            d = _mixed_diff(ker.eval(n, c, "near_unity"), ker.eval(n, c, "residues"))
            checks.append(_check(f"{name} small-c seam c={c!r}", d, tol))
    # repeated-root windows
    for name in ("lgf4", "lgf8"):
        ker = axial_kernel(name)
        cs = ker.c_star
        for sgn in (-1, 1):
            c = cs + sgn * TAYLOR_WINDOW
            d = _mixed_diff(ker.eval(n, c, "taylor"), ker.eval(n, c, "factorized"))
            checks.append(_check(f"{name} Taylor window edge c*{sgn:+d}e-5", d, tol))
            c = cs + sgn * FACTOR_WINDOW
            d = _mixed_diff(ker.eval(n, c, "factorized"), ker.eval(n, c, "residues"))
            checks.append(_check(f"{name} factorized window edge c*{sgn:+d}*{FACTOR_WINDOW}",
                                 d, tol))
        m = np.arange(51)
        worst = 0.0
        for delta in (-1e-4, -1e-5, -1e-6, 1e-6, 1e-5, 1e-4):
            c = cs + delta
            worst = max(worst, float(np.max(np.abs(ker.eval(m, c, "taylor")
                                                   - ker.eval(m, c, "factorized")))))
        checks.append(_check(f"{name} Taylor vs factorized, n<=50", worst, tol))
    # difference equation in every regime
    for name in STENCIL_IDS:
        ps = _recurrence_params(name)
        worst = max(recurrence_residual(name, p, scaled=True) for p in ps)
        raw = max(recurrence_residual(name, p) for p in ps)
        checks.append(_check(f"{name} recurrence residual / max(1,|G|), n in [0,60]", worst,
                             recurrence_tol, unscaled=raw))
    # free-space regime boundary of I(n, t): both methods at t_min
    for name in SPLIT_IDS:
        ev = IEvaluator(name)
        top = ev.n_max + 1
        worst = float(np.max(np.abs(ev.I_fft(ev.t_min)[:top] - ev.I_series(ev.t_min)[:top])))
        checks.append(_check(f"{name} I(n,t) quadrature vs series at t_min", worst,
                             10 * ev.pack.eps_a))
    return _finish("seams", checks)


# ---------------------------------------------------------------------------

def _draw(rng, name):
    st = get_stencil(name)
    kind = int(rng.integers(4))
    if st.is_split:
        cmax = 2 * float(st.sigma_max)
        if kind == 0:
            return 0.0
        if kind == 1:
            return float(10 ** rng.uniform(-7, -3))
        if kind == 2 and name in ("lgf4", "lgf8"):
            cs = axial_kernel(name).c_star
            return float(cs + rng.choice([-1, 1]) * 10 ** rng.uniform(-7, -0.7))
        return float(rng.uniform(0, cmax))
    if kind == 0:
        return (0.0, 0.0)
    if kind == 1:
        return (float(10 ** rng.uniform(-8, -2)), float(10 ** rng.uniform(-8, -2)))
    if kind == 2 and name == "meh4":
        y2 = float(rng.uniform(0.5, 1.0))
        return (y2, 1.5 - y2)
    return (float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))


def oracle(samples: int = 200, seed: int = 7, n_max: int = 40, abs_tol: float = 1e-12,
           rel_tol: float = 1e-11):
    rng = np.random.default_rng(seed)
    worst_abs = 0.0
    failures = []
    for _ in range(samples):
        name = STENCIL_IDS[int(rng.integers(len(STENCIL_IDS)))]
        param = _draw(rng, name)
        n = int(rng.integers(0, n_max + 1))
        ker = axial_kernel(name)
        if get_stencil(name).is_split:
            val = float(ker.eval([n], param)[0])
        else:
            val = float(ker.eval([n], *param)[0])
        ref = axial_reference(name, n, param, 1e-13)
        err = abs(val - ref)
        rel = err / abs(ref) if ref != 0 else (0.0 if err == 0 else math.inf)
        ok = err <= abs_tol or rel <= rel_tol
        worst_abs = max(worst_abs, err)
        if not ok:
            failures.append({"stencil": name, "n": n, "param": param, "value": val,
                             "reference": ref})
    checks = [_check(f"{samples} axial cases vs quadrature (abs<={abs_tol} or rel<={rel_tol})",
                     len(failures), 0, passed=not failures, worst_abs=worst_abs)]
    return _finish("oracle", checks, seed=seed, failures=failures)


def convergence(one_unbounded_Ns=(16, 32, 64, 128), unbounded_Ns=(16, 32)):
    expected = {"lgf2": 2, "lgf4": 4, "meh4": 4, "lgf6": 6, "meh6": 6}
    checks, rows_out = [], []
    rows = convergence_study(list(expected), "one_unbounded", one_unbounded_Ns)
    for name, order in expected.items():
        last = [r for r in rows if r[0] == name][-1]
        checks.append(_check(f"{name} one-unbounded order {last[3]:.3f} vs {order}",
                             abs(last[3] - order), 0.5))
    rows_out += [["one_unbounded", *r] for r in rows]
    rows = convergence_study(["lgf2", "lgf4"], "unbounded", unbounded_Ns)
    for name, order in (("lgf2", 2), ("lgf4", 4)):
        last = [r for r in rows if r[0] == name][-1]
        checks.append(_check(f"{name} fully unbounded order {last[3]:.3f} vs {order}",
                             abs(last[3] - order), 0.6))
    rows_out += [["unbounded", *r] for r in rows]
    return _finish("convergence", checks, rows=rows_out)


SUITES = {"residual3": residual3, "residual1": residual1, "seams": seams,
          "oracle": oracle, "convergence": convergence}


def run_suite(name: str, **kw):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name](**kw)
