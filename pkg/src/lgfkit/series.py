"""Exact rational polynomial algebra and large-t expansion coefficients.

The large-t behaviour of

    I(n, t) = 1/(2 pi) * int_{-pi}^{pi} exp(-t sigma(k)) cos(n k) dk

is captured by ``1/sqrt(4 pi t) * sum_j b_j(n) t**-j``.  Every ``b_j`` is an
even polynomial in ``n`` with rational coefficients.  They are produced here
with ``fractions.Fraction`` arithmetic only, so the identities between them
hold exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "RationalPoly",
    "MultiPoly",
    "ExpansionPack",
    "build_b_coefficients",
    "build_g3",
    "build_g2",
    "g3_value",
    "g2_value",
    "select_thresholds",
    "select_threshold_2d",
    "build_expansion_pack",
    "revert_series",
    "bessel_b_coefficients",
]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalPoly:
    """Dense univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` multiplies ``x**i``.  Trailing zeros are always trimmed, so
    the zero polynomial has an empty coefficient list.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_frac(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "RationalPoly":
        return cls([0] * degree + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalPoly([other])
        return isinstance(other, RationalPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RationalPoly) else -_frac(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            s = _frac(other)
            return RationalPoly(c * s for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "RationalPoly":
        out = RationalPoly([1])
        for _ in range(e):
            out = out * self
        return out

    def compose(self, inner: "RationalPoly") -> "RationalPoly":
        """Return ``self(inner(x))``."""
        out = RationalPoly()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    def derivative(self) -> "RationalPoly":
        return RationalPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def shift(self, x0) -> "RationalPoly":
        """Return the polynomial ``p(x0 + u)`` as a polynomial in ``u``."""
        x0 = _frac(x0)
        out = RationalPoly()
        base = RationalPoly([x0, 1])
        for c in reversed(self.coeffs):
            out = out * base + c
        return out

    def __call__(self, x):
        """Exact evaluation for ints/Fractions, Horner in floating point otherwise."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = 0.0 * x
        for c in reversed(self.float_coeffs()):
            acc = acc * x + c
        return acc

    def float_coeffs(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def to_strings(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "RationalPoly":
        return cls(Fraction(s) for s in items)


class MultiPoly:
    """Sparse multivariate polynomial, ``{exponent tuple: Fraction}``."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {tuple(k): _frac(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def constant(cls, nvars: int, value) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        e = [0] * nvars
        e[index] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def from_univariate(cls, p: RationalPoly, nvars: int, index: int) -> "MultiPoly":
        terms = {}
        for d, c in enumerate(p.coeffs):
            e = [0] * nvars
            e[index] = d
            terms[tuple(e)] = c
        return cls(nvars, terms)

    def __repr__(self):
        return f"MultiPoly({self.nvars}, {{{', '.join(f'{k}: {v}' for k, v in sorted(self.terms.items()))}}})"

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(self.nvars, other)
        return isinstance(other, MultiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            s = _frac(other)
            return MultiPoly(self.nvars, {k: v * s for k, v in self.terms.items()})
        out: dict = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, Fraction(0)) + va * vb
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=-1)

    def __call__(self, *x):
        if len(x) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments, got {len(x)}")
        exact = all(isinstance(v, (int, Fraction)) for v in x)
        acc = Fraction(0) if exact else 0.0
        for k, c in self.terms.items():
            term = c if exact else float(c)
            for v, e in zip(x, k):
                if e:
                    term = term * v**e
            acc = acc + term
        return acc

    def substitute(self, index: int, value) -> "MultiPoly":
        """Fix variable ``index`` to an exact value; the result keeps ``nvars``."""
        value = _frac(value)
        out: dict = {}
        for k, c in self.terms.items():
            e = list(k)
            p = e[index]
            e[index] = 0
            key = tuple(e)
            out[key] = out.get(key, Fraction(0)) + c * value**p
        return MultiPoly(self.nvars, out)

    def permuted(self, perm: Sequence[int]) -> "MultiPoly":
        return MultiPoly(self.nvars, {tuple(k[p] for p in perm): v for k, v in self.terms.items()})

    def collect(self, index: int) -> dict[int, "MultiPoly"]:
        """Group terms by the power of variable ``index``."""
        groups: dict[int, dict] = {}
        for k, c in self.terms.items():
            e = list(k)
            p = e[index]
            e[index] = 0
            groups.setdefault(p, {})[tuple(e)] = c
        return {p: MultiPoly(self.nvars, t) for p, t in groups.items()}

    def to_json(self) -> list:
        return [[list(k), f"{v.numerator}/{v.denominator}"] for k, v in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, nvars: int, data) -> "MultiPoly":
        return cls(nvars, {tuple(k): Fraction(v) for k, v in data})


# ---------------------------------------------------------------------------
# large-t expansion of I(n, t)
# ---------------------------------------------------------------------------

def _double_factorial_odd(j: int) -> int:
    # (2j-1)!!, with (-1)!! = 1
    out = 1
    for i in range(1, 2 * j, 2):
        out *= i
    return out


def _symbol_taylor(coeffs: Sequence[Fraction], count: int) -> list[Fraction]:
    """Taylor coefficients of sigma(k) in powers of k**2, index m -> k**(2m)."""
    out = [Fraction(0)]
    for m in range(1, count):
        s = sum(_frac(a) * (j + 1) ** (2 * m) for j, a in enumerate(coeffs))
        out.append(2 * (-1) ** m * s / math.factorial(2 * m))
    return out


def build_b_coefficients(st, J: int) -> list[RationalPoly]:
    """Return ``[b_0, ..., b_{J-1}]`` for the split stencil ``st``.

    ``st`` needs a ``coeffs`` sequence holding ``a_1..a_w``.  The symbol is
    split as ``k**2 + (sigma - k**2)``, the correction is exponentiated as a
    power series in ``x = k**2`` with coefficients polynomial in ``t``,
    multiplied by the series of ``cos(n k)``, and each ``x**j`` is replaced
    by its Gaussian moment ``(2j-1)!! / (2t)**j``.  Powers of ``t`` are then
    collected; only terms whose total power is below ``J`` are complete.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    M = 2 * (J - 1)  # highest power of x = k**2 that feeds b_{J-1}
    sig = _symbol_taylor(st.coeffs, M + 1)
    if M >= 1 and sig[1] != 1:
        raise ValueError(f"stencil is not consistent: sigma(k) = {sig[1]} k^2 + ...")

    # X(x) = -t (sigma - x); coefficient of x**m is a polynomial in t: {deg: c}
    X = [{} for _ in range(M + 1)]
    for m in range(2, M + 1):
        if sig[m]:
            X[m] = {1: -sig[m]}

    # E = exp(X) via m e_m = sum_i i X_i e_{m-i}
    E: list[dict] = [{0: Fraction(1)}]
    for m in range(1, M + 1):
        acc: dict = {}
        for i in range(2, m + 1):
            if not X[i]:
                continue
            for dx, cx in X[i].items():
                for de, ce in E[m - i].items():
                    acc[dx + de] = acc.get(dx + de, Fraction(0)) + i * cx * ce
        E.append({d: c / m for d, c in acc.items() if c})

    b = [[Fraction(0)] * (2 * j + 1) for j in range(J)]
    for j in range(M + 1):
        moment = Fraction(_double_factorial_odd(j), 2**j)
        for i in range(j + 1):
            # cos(nk) term: (-1)^m n^{2m} x^m / (2m)!
            m = j - i
            cos_c = Fraction((-1) ** m, math.factorial(2 * m))
            for p, ce in E[i].items():
                power = j - p  # contributes t**(p - j)
                if power >= J:
                    continue
                b[power][2 * m] += ce * cos_c * moment
    return [RationalPoly(c) for c in b]


def bessel_b_coefficients(J: int) -> list[RationalPoly]:
    """Coefficients from the large-argument expansion of ``exp(-2t) I_n(2t)``.

    This is the classical Hankel expansion, kept as an independent reference
    for the second order stencil.
    """
    out = []
    n2 = RationalPoly([0, 0, 4])  # 4 n^2
    for k in range(J):
        p = RationalPoly([1])
        for i in range(1, k + 1):
            p = p * (n2 - (2 * i - 1) ** 2)
        out.append(p * Fraction((-1) ** k, math.factorial(k) * 8**k * 2**k))
    return out


def build_g3(b: Sequence[RationalPoly], J: int) -> list[MultiPoly]:
    """Tail polynomials for the 3D outer expansion, ``g_0..g_{J-1}``."""
    if len(b) < J:
        raise ValueError("need at least J b-polynomials")
    mb = [[MultiPoly.from_univariate(p, 3, i) for p in b[:J]] for i in range(3)]
    out = []
    for j in range(J):
        acc = MultiPoly(3)
        for l1 in range(j + 1):
            for l2 in range(j + 1 - l1):
                l3 = j - l1 - l2
                acc = acc + mb[0][l1] * mb[1][l2] * mb[2][l3]
        out.append(acc * Fraction(1, 2 * j + 1))
    return out


def build_g2(b: Sequence[RationalPoly], J: int) -> list[MultiPoly]:
    """Tail polynomials of the 2D relative LGF; ``g_0`` is identically zero."""
    if len(b) < J:
        raise ValueError("need at least J b-polynomials")
    mb = [[MultiPoly.from_univariate(p, 2, i) for p in b[:J]] for i in range(2)]
    out = [MultiPoly(2)]
    for j in range(1, J):
        acc = MultiPoly(2)
        for l1 in range(j + 1):
            l2 = j - l1
            acc = acc + mb[0][l1] * mb[1][l2] - b[l1](0) * b[l2](0)
        out.append(acc * Fraction(1, j))
    return out


def g3_value(bvals: Sequence[Sequence], j: int):
    """``g_j`` from b-values: ``bvals[i][l] = b_l(n_i)`` (exact or float)."""
    acc = 0
    for l1 in range(j + 1):
        for l2 in range(j + 1 - l1):
            acc = acc + bvals[0][l1] * bvals[1][l2] * bvals[2][j - l1 - l2]
    return acc / (2 * j + 1)


def g2_value(bvals: Sequence[Sequence], b0vals: Sequence, j: int):
    if j == 0:
        return 0 * bvals[0][0]
    acc = 0
    for l1 in range(j + 1):
        acc = acc + bvals[0][l1] * bvals[1][j - l1] - b0vals[l1] * b0vals[j - l1]
    return acc / j


def select_thresholds(b: Sequence[RationalPoly], J: int, n_max: int,
                      eps_a: float, eps_r: float) -> tuple[float, float]:
    """Lower and upper switching times ``(t_min, T_min)``.

    The first neglected term (index ``J``) stands in for the truncation
    error, and the leading term for the magnitude of the function.
    """
    if J < 2:
        raise ValueError("J must be >= 2")
    if len(b) < J + 1:
        raise ValueError(f"need b_0..b_J ({J + 1} polynomials), got {len(b)}")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not (0 < eps_a < 1 and 0 < eps_r < 1):
        raise ValueError("tolerances must lie in (0, 1)")
    bJ = abs(float(b[J](n_max)))
    t_min = max((bJ / eps_r) ** (1.0 / J),
                (bJ / (eps_a * math.sqrt(4 * math.pi))) ** (2.0 / (2 * J + 1)))
    bn = [b[l](n_max) for l in range(J + 1)]
    gJ = abs(float(g3_value([bn, bn, bn], J)))
    T_min = max((gJ / eps_r) ** (1.0 / J),
                (gJ / (eps_a * math.sqrt(16 * math.pi**3))) ** (2.0 / (2 * J + 1)))
    return t_min, max(T_min, t_min)


def select_threshold_2d(b: Sequence[RationalPoly], J: int, n_max: int,
                        eps_a: float, t_min: float) -> float:
    """Upper time for the 2D relative LGF: first neglected tail term <= eps_a."""
    if len(b) < J + 1:
        raise ValueError(f"need b_0..b_J ({J + 1} polynomials), got {len(b)}")
    bn = [b[l](n_max) for l in range(J + 1)]
    b0 = [b[l](0) for l in range(J + 1)]
    gJ = abs(float(g2_value([bn, bn], b0, J)))
    T = (gJ / (4 * math.pi * eps_a)) ** (1.0 / J) if gJ > 0 else 0.0
    return max(T, t_min)


@dataclass
class ExpansionPack:
    """Everything the free-space evaluator needs for one stencil.

    ``b`` holds the ``J`` terms in use.  ``b_next`` is the first neglected
    term, kept because it drives the threshold estimates.
    """

    stencil_id: str
    J: int
    b: list[RationalPoly]
    b_next: RationalPoly
    eps_a: float
    eps_r: float
    n_max: int
    t_min: float
    T_min: float
    T_2d: float
    g3: list[MultiPoly] = field(default_factory=list)
    g2: list[MultiPoly] = field(default_factory=list)

    @property
    def b_all(self) -> list[RationalPoly]:
        return list(self.b) + [self.b_next]

    def to_json(self) -> str:
        data = {
            "stencil": self.stencil_id,
            "J": self.J,
            "n_max": self.n_max,
            "eps_a": self.eps_a,
            "eps_r": self.eps_r,
            "t_min": self.t_min,
            "T_min": self.T_min,
            "T_2d": self.T_2d,
            "b": [p.to_strings() for p in self.b],
            "b_next": self.b_next.to_strings(),
            "g3": [g.to_json() for g in self.g3],
            "g2": [g.to_json() for g in self.g2],
        }
        return json.dumps(data, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExpansionPack":
        d = json.loads(text)
        return cls(
            stencil_id=d["stencil"], J=d["J"],
            b=[RationalPoly.from_strings(p) for p in d["b"]],
            b_next=RationalPoly.from_strings(d["b_next"]),
            eps_a=d["eps_a"], eps_r=d["eps_r"], n_max=d["n_max"],
            t_min=d["t_min"], T_min=d["T_min"], T_2d=d["T_2d"],
            g3=[MultiPoly.from_json(3, g) for g in d["g3"]],
            g2=[MultiPoly.from_json(2, g) for g in d["g2"]],
        )


def build_expansion_pack(st, J: int = 10, n_max: int = 22, eps_a: float = 1e-15,
                         eps_r: float = 1e-15, with_tails: bool = False) -> ExpansionPack:
    """Build b-polynomials and thresholds; ``with_tails`` also expands g3/g2."""
    b = build_b_coefficients(st, J + 1)
    t_min, T_min = select_thresholds(b, J, n_max, eps_a, eps_r)
    T_2d = select_threshold_2d(b, J, n_max, eps_a, t_min)
    g3 = build_g3(b, J) if with_tails else []
    g2 = build_g2(b, J) if with_tails else []
    return ExpansionPack(st.name, J, b[:J], b[J], eps_a, eps_r, n_max,
                         t_min, T_min, T_2d, g3, g2)


def revert_series(d: Sequence, order: int) -> list[Fraction]:
    """Invert ``y = sum_{k>=1} d[k] x**k`` into ``x = sum_{i>=1} m[i] y**i``.

    ``d[0]`` must be zero and ``d[1]`` nonzero.  Returns ``m[0..order]``
    with ``m[0] = 0``; exact in rational arithmetic.
    """
    d = [_frac(v) for v in d] + [Fraction(0)] * (order + 1)
    if d[0] != 0 or d[1] == 0:
        raise ValueError("series must start at the linear term")
    m = [Fraction(0)] * (order + 1)
    # powers[k] holds the coefficients of x(y)**k truncated at y**order
    for i in range(1, order + 1):
        # coefficient of y**i in sum_k d_k x(y)^k must equal delta_{i,1}
        x = list(m)
        x[i] = Fraction(0)
        acc = Fraction(0)
        pw = [Fraction(0)] * (order + 1)
        pw[0] = Fraction(1)
        for k in range(1, i + 1):
            nxt = [Fraction(0)] * (order + 1)
            for a, ca in enumerate(pw):
                if ca:
                    for bidx in range(1, order + 1 - a):
                        if x[bidx]:
                            nxt[a + bidx] += ca * x[bidx]
            pw = nxt
            acc += d[k] * pw[i]
        m[i] = ((1 if i == 1 else 0) - acc) / d[1]
    return m


