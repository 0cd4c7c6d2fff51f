"""Catalog of numerical-radius inequalities.

Each evaluator returns the two sides of one inequality as intervals: any
quantity that depends on a numerical radius carries the certified
enclosure of that radius through the formula (every formula is
nondecreasing in each radius, and Orlicz functions are nondecreasing, so
endpoint evaluation is exact interval propagation). Matrix functions are
evaluated through Hermitian eigendecompositions.

A report stores ``slack = rhs - lhs`` from interval midpoints; the error
budget is the half-widths of both sides plus ``1e-12 * scale`` arithmetic
slop plus ``slack_tol * scale`` (default ``1e-7``), with
``scale = max(1, |lhs|, |rhs|)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import matrix_core as mc
from .errors import (
    DimensionMismatch,
    IncomparableBounds,
    MissingInput,
    NotCommuting,
    NotContraction,
    NotPSD,
    NotSubmultiplicative,
    ParamOutOfRange,
    UnknownBound,
)
from .orlicz import OrliczFunction, complement, fmt_param, submultiplicative_probe
from .radius import numerical_radius

SLACK_RTOL = 1e-7
ARITH_RTOL = 1e-12
ALPHA_CLAMP = 1e-3
VERDICTS = ("holds", "tight", "violated", "overflow")


# -- interval arithmetic for radius-dependent quantities ---------------------


@dataclass(frozen=True)
class Iv:
    lo: float
    hi: float

    @staticmethod
    def of(x) -> "Iv":
        return x if isinstance(x, Iv) else Iv(float(x), float(x))

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def __add__(self, o):
        o = Iv.of(o)
        return Iv(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __mul__(self, o):
        # operands are nonnegative throughout the catalog
        o = Iv.of(o)
        return Iv(self.lo * o.lo, self.hi * o.hi)

    __rmul__ = __mul__

    def __truediv__(self, c: float):
        return Iv(self.lo / c, self.hi / c)

    def __pow__(self, p: float):
        with np.errstate(over="ignore"):
            return Iv(float(np.power(self.lo, p)), float(np.power(self.hi, p)))

    def map(self, f: Callable[[float], float]) -> "Iv":
        """Image under a nondecreasing f."""
        return Iv(float(f(self.lo)), float(f(self.hi)))

    def finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


def iv_max(*xs) -> Iv:
    xs = [Iv.of(x) for x in xs]
    return Iv(max(x.lo for x in xs), max(x.hi for x in xs))


def w(a: np.ndarray) -> Iv:
    c = numerical_radius(a)
    return Iv(max(0.0, c.lower), c.upper)


# -- parameters and reports --------------------------------------------------


@dataclass(frozen=True)
class FactorPair:
    """Continuous f, g on [0, inf) with f(t) g(t) = t."""

    id: str
    f: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)
    g: Callable[[np.ndarray], np.ndarray] = field(compare=False, repr=False)

    def validate(self, grid: Optional[np.ndarray] = None) -> None:
        t = np.concatenate([[0.0], np.geomspace(1e-3, 50.0, 64)]) if grid is None else np.asarray(grid)
        prod = np.asarray(self.f(t)) * np.asarray(self.g(t))
        if np.any(np.abs(prod - t) > 1e-10 * np.maximum(1.0, t)):
            raise ParamOutOfRange(f"factor pair {self.id}: f(t) g(t) != t")


def power_pair(alpha: float) -> FactorPair:
    a = float(alpha)
    return FactorPair(f"pow:{fmt_param(a)}", lambda t: np.power(t, a), lambda t: np.power(t, 1.0 - a))


def parse_fg(spec: str, alpha: float = 0.5) -> FactorPair:
    """``alpha`` (t^alpha, t^(1-alpha)), ``sqrt`` or ``pow:A``."""
    spec = spec.strip()
    if spec == "alpha":
        return power_pair(alpha)
    if spec == "sqrt":
        return FactorPair("sqrt", np.sqrt, np.sqrt)
    if spec.startswith("pow:"):
        try:
            a = float(spec[4:])
        except ValueError:
            raise ParamOutOfRange(f"bad factor-pair specifier {spec!r}") from None
        if not 0.0 <= a <= 1.0:
            raise ParamOutOfRange("pow:A needs 0 <= A <= 1")
        return power_pair(a)
    raise ParamOutOfRange(f"bad factor-pair specifier {spec!r}; use alpha, sqrt or pow:A")


@dataclass(frozen=True)
class BoundParams:
    alpha: float = 0.5
    r: float = 1.0
    phi: Optional[OrliczFunction] = None
    psi: Optional[OrliczFunction] = None
    fg: Optional[FactorPair] = None
    n: int = 1

    def factor_pair(self) -> FactorPair:
        return self.fg if self.fg is not None else power_pair(self.alpha)


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    params: BoundParams
    lhs: float
    rhs: float
    slack: float
    error_budget: float
    verdict: str
    functional: Optional[str] = None


# -- catalog plumbing ----------------------------------------------------------


@dataclass(frozen=True)
class BoundDescriptor:
    id: str
    inputs: tuple[str, ...]
    uses: frozenset
    statement: str
    ref: str
    family: bool = False
    alpha_range: tuple[float, float] = (0.0, 1.0)
    alpha_open_low: bool = False
    r_min: float = 1.0
    r_integer: bool = False
    psd_inputs: tuple[str, ...] = ()
    contraction_inputs: tuple[str, ...] = ()
    commuting: bool = False
    submultiplicative: bool = False
    clamp_alpha: bool = False

    @property
    def requires(self) -> tuple[str, ...]:
        return self.inputs + tuple(sorted(self.uses))


@dataclass
class _Ctx:
    """Per-evaluation view of the inputs with cached derived matrices."""

    m: dict
    p: BoundParams
    alpha: float
    _cache: dict = field(default_factory=dict)

    @property
    def phi(self) -> OrliczFunction:
        return self.p.phi

    def F(self, h: np.ndarray) -> np.ndarray:
        """phi(H) for PSD H."""
        return mc.func_calc(self.phi, h)

    def gram(self, a: np.ndarray) -> np.ndarray:
        """A*A."""
        return np.conj(a).T @ a

    def cogram(self, a: np.ndarray) -> np.ndarray:
        """AA*."""
        return a @ np.conj(a).T


_CATALOG: dict[str, tuple[BoundDescriptor, Callable]] = {}


def _bound(id: str, inputs: Sequence[str], uses: Iterable[str], statement: str, ref: str, **kw):
    def deco(fn):
        _CATALOG[id] = (BoundDescriptor(id, tuple(inputs), frozenset(uses), statement, ref, **kw), fn)
        return fn

    return deco


def lam_max(h: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix (= norm = w for PSD)."""
    return float(mc.hermitian_eig(h).eigenvalues[-1])


def psd_norm(h: np.ndarray) -> float:
    return max(0.0, lam_max(h))


def _abs_herm_fn(phi: Callable, h: np.ndarray) -> np.ndarray:
    """phi(|H|) for Hermitian H."""
    eig = mc.hermitian_eig(h)
    vals = np.asarray(phi(np.abs(eig.eigenvalues)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise OverflowError("phi overflowed on |H|")
    return (eig.basis * vals) @ np.conj(eig.basis).T


def _re(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + np.conj(m).T)


def _phi_key(phi: Optional[OrliczFunction], power: float) -> str:
    if phi is None:
        return f"w^{fmt_param(power)}"
    if phi.id.startswith("power:"):
        return f"w^{fmt_param(power * phi.param('r'))}"
    return f"{phi.id}(w^{fmt_param(power)})"


# -- classical bounds -----------------------------------------------------------


@_bound("EQV", ["A"], [], "1/2 ||A|| <= w(A) <= ||A|| (tighter side reported)", "fundamental inequality")
def _eqv(c: _Ctx):
    a = c.m["A"]
    wa, na = w(a), mc.operator_norm(a)
    lower = (Iv.of(0.5 * na), wa)
    upper = (wa, Iv.of(na))
    return lower if (lower[1].mid - lower[0].mid) <= (upper[1].mid - upper[0].mid) else upper


@_bound("KITT03", ["A"], [], "w(A) <= 1/2 (||A|| + ||A^2||^{1/2})", "Kittaneh 2003")
def _kitt03(c: _Ctx):
    a = c.m["A"]
    return w(a), 0.5 * (mc.operator_norm(a) + math.sqrt(mc.operator_norm(a @ a)))


@_bound("KITT05L", ["A"], [], "1/4 |||A|^2 + |A*|^2|| <= w^2(A)", "Kittaneh 2005, lower")
def _kitt05l(c: _Ctx):
    a = c.m["A"]
    return 0.25 * psd_norm(c.gram(a) + c.cogram(a)), w(a) ** 2


@_bound("KITT05U", ["A"], [], "w^2(A) <= 1/2 |||A|^2 + |A*|^2||", "Kittaneh 2005, upper")
def _kitt05u(c: _Ctx):
    a = c.m["A"]
    return w(a) ** 2, 0.5 * psd_norm(c.gram(a) + c.cogram(a))


@_bound("HK1", ["A"], ["alpha", "r"], "w^r(A) <= 1/2 |||A|^{2 r alpha} + |A*|^{2 r (1-alpha)}||", "El-Haddad-Kittaneh (i)")
def _hk1(c: _Ctx):
    a, r, al = c.m["A"], c.p.r, c.alpha
    rhs = 0.5 * psd_norm(mc.psd_power(c.gram(a), r * al) + mc.psd_power(c.cogram(a), r * (1 - al)))
    return w(a) ** r, rhs


@_bound("HK2", ["A"], ["alpha", "r"], "w^{2r}(A) <= ||alpha |A|^{2r} + (1-alpha) |A*|^{2r}||", "El-Haddad-Kittaneh (ii)")
def _hk2(c: _Ctx):
    a, r, al = c.m["A"], c.p.r, c.alpha
    rhs = psd_norm(al * mc.psd_power(c.gram(a), r) + (1 - al) * mc.psd_power(c.cogram(a), r))
    return w(a) ** (2 * r), rhs


@_bound("AOK", ["A"], [], "w^2(A) <= 1/4 |||A|^2 + |A*|^2|| + 1/2 w(A^2)", "Abu-Omar-Kittaneh")
def _aok(c: _Ctx):
    a = c.m["A"]
    return w(a) ** 2, 0.25 * psd_norm(c.gram(a) + c.cogram(a)) + 0.5 * w(a @ a)


@_bound("BP", ["A"], ["r"], "w^{2r}(A) <= 1/4 |||A|^{2r} + |A*|^{2r}|| + 1/2 w(|A|^r |A*|^r)", "Bhunia-Paul")
def _bp(c: _Ctx):
    a, r = c.m["A"], c.p.r
    pa, pb = mc.psd_power(c.gram(a), 0.5 * r), mc.psd_power(c.cogram(a), 0.5 * r)
    rhs = 0.25 * psd_norm(pa @ pa + pb @ pb) + 0.5 * w(pa @ pb)
    return w(a) ** (2 * r), rhs


@_bound("HOLB4", ["A", "B"], [], "w(AB) <= 4 w(A) w(B)", "Holbrook")
def _holb4(c: _Ctx):
    a, b = c.m["A"], c.m["B"]
    return w(a @ b), 4.0 * w(a) * w(b)


@_bound("HOLB2C", ["A", "B"], [], "w(AB) <= 2 w(A) w(B) for commuting A, B", "Holbrook, commuting", commuting=True)
def _holb2c(c: _Ctx):
    a, b = c.m["A"], c.m["B"]
    return w(a @ b), 2.0 * w(a) * w(b)


@_bound("FH", ["A", "B"], [], "w(AB + BA) <= 2 sqrt(2) w(A) ||B||", "Fong-Holbrook")
def _fh(c: _Ctx):
    a, b = c.m["A"], c.m["B"]
    return w(a @ b + b @ a), 2.0 * math.sqrt(2.0) * w(a) * mc.operator_norm(b)


@_bound("POWK", ["A"], ["r"], "w(A^k) <= w(A)^k, k = r", "power inequality", r_integer=True)
def _powk(c: _Ctx):
    a, k = c.m["A"], int(round(c.p.r))
    return w(np.linalg.matrix_power(a, k)), w(a) ** k


def _kitt_terms(c: _Ctx, fsq: Callable, gsq: Callable):
    """(A g^2(|T*|) A*, B* f^2(|T|) B, C g^2(|S*|) C*, D* f^2(|S|) D)."""
    A, B, C, D, S, T = (c.m[k] for k in "ABCDST")

    def sandwich(outer, inner, left_adjoint: bool):
        if left_adjoint:
            return np.conj(outer).T @ inner @ outer
        return outer @ inner @ np.conj(outer).T

    ft = mc.func_calc(fsq, c.gram(T))
    gt = mc.func_calc(gsq, c.cogram(T))
    fs = mc.func_calc(fsq, c.gram(S))
    gs = mc.func_calc(gsq, c.cogram(S))
    return (
        _herm(sandwich(A, gt, False)),
        _herm(sandwich(B, ft, True)),
        _herm(sandwich(C, gs, False)),
        _herm(sandwich(D, fs, True)),
    )


def _herm(h: np.ndarray) -> np.ndarray:
    return 0.5 * (h + np.conj(h).T)


def _fg_squares(fg: FactorPair):
    """Maps s = t^2 to f(t)^2 and g(t)^2, for use on X*X / XX*."""
    return (lambda s: np.asarray(fg.f(np.sqrt(s))) ** 2, lambda s: np.asarray(fg.g(np.sqrt(s))) ** 2)


@_bound(
    "KITT-ATBCSD",
    ["A", "B", "C", "D", "S", "T"],
    ["alpha"],
    "w(ATB + CSD) <= 1/2 ||A|T*|^{2(1-alpha)}A* + B*|T|^{2alpha}B + C|S*|^{2(1-alpha)}C* + D*|S|^{2alpha}D||",
    "Kittaneh 2005, generalized",
)
def _kitt_atbcsd(c: _Ctx):
    A, B, C, D, S, T = (c.m[k] for k in "ABCDST")
    al = c.alpha
    terms = _kitt_terms(c, lambda s: np.power(s, al), lambda s: np.power(s, 1 - al))
    return w(A @ T @ B + C @ S @ D), 0.5 * psd_norm(sum(terms))


# -- Orlicz bounds ------------------------------------------------------------------


@_bound("T31", ["A"], ["phi", "psi"], "w^2(A) <= ||phi(|A|) + psi(|A*|)||", "Orlicz, complementary pair")
def _t31(c: _Ctx):
    a = c.m["A"]
    psi = c.p.psi
    rhs = psd_norm(mc.func_calc(lambda s: c.phi(np.sqrt(s)), c.gram(a)) + mc.func_calc(lambda s: psi(np.sqrt(s)), c.cogram(a)))
    return w(a) ** 2, rhs


@_bound("T33i", ["A", "B", "X"], ["phi", "psi", "r"], "w^r(A*XB) <= ||X||^r w(phi(|A|^r) + psi(|B|^r))", "Orlicz, A*XB with complementary pair", r_min=2.0)
def _t33i(c: _Ctx):
    A, B, X = c.m["A"], c.m["B"], c.m["X"]
    r, psi = c.p.r, c.p.psi
    m = mc.func_calc(lambda s: c.phi(np.power(s, 0.5 * r)), c.gram(A)) + mc.func_calc(
        lambda s: psi(np.power(s, 0.5 * r)), c.gram(B)
    )
    return w(np.conj(A).T @ X @ B) ** r, mc.operator_norm(X) ** r * psd_norm(m)


@_bound(
    "T33ii",
    ["A", "B", "X"],
    ["phi", "psi", "alpha"],
    "w(A*XB) <= phi(sqrt(w(B*|X|^{2alpha}B))) + psi(sqrt(w(A*|X*|^{2(1-alpha)}A)))",
    "Orlicz, A*XB mixed powers",
)
def _t33ii(c: _Ctx):
    A, B, X = c.m["A"], c.m["B"], c.m["X"]
    al, psi = c.alpha, c.p.psi
    xb = mc.psd_power(c.gram(X), al)
    xa = mc.psd_power(c.cogram(X), 1 - al)
    u = math.sqrt(psd_norm(_herm(np.conj(B).T @ xb @ B)))
    v = math.sqrt(psd_norm(_herm(np.conj(A).T @ xa @ A)))
    return w(np.conj(A).T @ X @ B), float(c.phi(u)) + float(psi(v))


@_bound("T34i", ["A"], ["phi"], "phi(w(A)) <= 1/2 ||phi(|A|) + phi(|A*|)||", "Orlicz form of Kittaneh 2003")
def _t34i(c: _Ctx):
    a = c.m["A"]
    f = lambda s: c.phi(np.sqrt(s))
    rhs = 0.5 * psd_norm(mc.func_calc(f, c.gram(a)) + mc.func_calc(f, c.cogram(a)))
    return w(a).map(c.phi), rhs


@_bound("T34ii", ["A"], ["phi", "alpha"], "phi(w(A)) <= 1/2 ||phi(|A|^{2alpha}) + phi(|A*|^{2(1-alpha)})||", "Orlicz form, mixed powers")
def _t34ii(c: _Ctx):
    a, al = c.m["A"], c.alpha
    rhs = 0.5 * psd_norm(
        mc.func_calc(lambda s: c.phi(np.power(s, al)), c.gram(a))
        + mc.func_calc(lambda s: c.phi(np.power(s, 1 - al)), c.cogram(a))
    )
    return w(a).map(c.phi), rhs


@_bound(
    "T36i",
    ["A"],
    ["phi", "alpha"],
    "phi(w^2(A)) <= ||alpha phi(|A|^{1/alpha}) + (1-alpha) phi(|A*|^{1/(1-alpha)})||",
    "Orlicz upper bound for phi(w^2), reciprocal powers",
    clamp_alpha=True,
)
def _t36i(c: _Ctx):
    a, al = c.m["A"], c.alpha
    rhs = psd_norm(
        al * mc.func_calc(lambda s: c.phi(np.power(s, 0.5 / al)), c.gram(a))
        + (1 - al) * mc.func_calc(lambda s: c.phi(np.power(s, 0.5 / (1 - al))), c.cogram(a))
    )
    return (w(a) ** 2).map(c.phi), rhs


@_bound("T36ii", ["A"], ["phi", "alpha"], "phi(w^2(A)) <= ||alpha phi(|A|^2) + (1-alpha) phi(|A*|^2)||", "Orlicz form of El-Haddad-Kittaneh (ii)")
def _t36ii(c: _Ctx):
    a, al = c.m["A"], c.alpha
    rhs = psd_norm(al * c.F(c.gram(a)) + (1 - al) * c.F(c.cogram(a)))
    return (w(a) ** 2).map(c.phi), rhs


@_bound("T38", ["A"], ["phi"], "phi(w^2(A)) <= 1/4 ||phi(|A|^2) + phi(|A*|^2)|| + 1/2 phi(w(A^2))", "Orlicz form of Abu-Omar-Kittaneh")
def _t38(c: _Ctx):
    a = c.m["A"]
    rhs = 0.25 * psd_norm(c.F(c.gram(a)) + c.F(c.cogram(a))) + 0.5 * w(a @ a).map(c.phi)
    return (w(a) ** 2).map(c.phi), rhs


@_bound("T310", ["A", "B", "X"], ["phi"], "phi(w(A*XB)) <= 1/2 w(phi(||X|| |A|^2) + phi(||X|| |B|^2))", "Orlicz, A*XB via phi only")
def _t310(c: _Ctx):
    A, B, X = c.m["A"], c.m["B"], c.m["X"]
    nx = mc.operator_norm(X)
    rhs = 0.5 * psd_norm(c.F(nx * c.gram(A)) + c.F(nx * c.gram(B)))
    return w(np.conj(A).T @ X @ B).map(c.phi), rhs


@_bound(
    "T310C",
    ["A", "B", "X"],
    ["phi"],
    "phi(w(A*XB)) <= ||X||/2 w(phi(|A|^2) + phi(|B|^2)), ||X|| <= 1",
    "Orlicz, A*XB with a contraction X",
    contraction_inputs=("X",),
)
def _t310c(c: _Ctx):
    A, B, X = c.m["A"], c.m["B"], c.m["X"]
    nx = mc.operator_norm(X)
    rhs = 0.5 * nx * psd_norm(c.F(c.gram(A)) + c.F(c.gram(B)))
    return w(np.conj(A).T @ X @ B).map(c.phi), rhs


def _heinz(c: _Ctx) -> np.ndarray:
    A, B, X = c.m["A"], c.m["B"], c.m["X"]
    return mc.psd_power(A, c.alpha) @ X @ mc.psd_power(B, 1 - c.alpha)


@_bound(
    "T312i",
    ["A", "B", "X"],
    ["phi", "alpha"],
    "phi(w(A^alpha X B^{1-alpha})) <= w(alpha phi(||X|| A) + (1-alpha) phi(||X|| B)), alpha in (0, 1/2]",
    "Orlicz, PSD pair (i)",
    alpha_range=(0.0, 0.5),
    alpha_open_low=True,
    psd_inputs=("A", "B"),
)
def _t312i(c: _Ctx):
    A, B, X = c.m["A"], c.m["B"], c.m["X"]
    nx, al = mc.operator_norm(X), c.alpha
    rhs = psd_norm(al * c.F(nx * A) + (1 - al) * c.F(nx * B))
    return w(_heinz(c)).map(c.phi), rhs


@_bound(
    "T312ii",
    ["A", "B", "X"],
    ["phi", "alpha"],
    "phi(w(A^alpha X B^{1-alpha})) <= 1/2 w(phi(||X|| A^{2alpha}) + phi(||X|| B^{2(1-alpha)}))",
    "Orlicz, PSD pair (ii)",
    psd_inputs=("A", "B"),
)
def _t312ii(c: _Ctx):
    A, B, X = c.m["A"], c.m["B"], c.m["X"]
    nx, al = mc.operator_norm(X), c.alpha
    rhs = 0.5 * psd_norm(c.F(nx * mc.psd_power(A, 2 * al)) + c.F(nx * mc.psd_power(B, 2 * (1 - al))))
    return w(_heinz(c)).map(c.phi), rhs


def _sum_terms(c: _Ctx):
    """For each k: (B_k* f^2(|X_k|) B_k, A_k* g^2(|X_k*|) A_k)."""
    fsq, gsq = _fg_squares(c.p.factor_pair())
    out = []
    for A, B, X in zip(c.m["A"], c.m["B"], c.m["X"]):
        fx = mc.func_calc(fsq, c.gram(X))
        gx = mc.func_calc(gsq, c.cogram(X))
        out.append((_herm(np.conj(B).T @ fx @ B), _herm(np.conj(A).T @ gx @ A)))
    return out


def _sum_axb(c: _Ctx) -> np.ndarray:
    return sum(np.conj(A).T @ X @ B for A, B, X in zip(c.m["A"], c.m["B"], c.m["X"]))


@_bound(
    "T314",
    ["A", "B", "X"],
    ["phi", "fg"],
    "phi(w(sum A_k* X_k B_k)) <= 1/(2n) sum ||phi(n B_k* f^2(|X_k|) B_k) + phi(n A_k* g^2(|X_k*|) A_k)||",
    "Orlicz, finite sum",
    family=True,
)
def _t314(c: _Ctx):
    n = len(c.m["A"])
    rhs = sum(psd_norm(c.F(n * mb) + c.F(n * ma)) for mb, ma in _sum_terms(c)) / (2 * n)
    return w(_sum_axb(c)).map(c.phi), rhs


@_bound(
    "T316",
    ["A", "B", "X"],
    ["phi", "fg"],
    "phi(w(sum A_k* X_k B_k)) <= 1/(sqrt(2) n) w(sum phi(n B_k* f^2 B_k) + i phi(n A_k* g^2 A_k))",
    "Orlicz, finite sum in w-form",
    family=True,
)
def _t316(c: _Ctx):
    n = len(c.m["A"])
    z = sum(c.F(n * mb) + 1j * c.F(n * ma) for mb, ma in _sum_terms(c))
    return w(_sum_axb(c)).map(c.phi), w(z) / (math.sqrt(2.0) * n)


@_bound(
    "T317",
    ["A", "B", "C", "D", "S", "T"],
    ["phi", "fg"],
    "phi(w(ATB + CSD)) <= 1/2 ||phi(A g^2(|T*|) A*) + phi(B* f^2(|T|) B) + phi(C g^2(|S*|) C*) + phi(D* f^2(|S|) D)||",
    "Orlicz form of the generalized Kittaneh 2005",
)
def _t317(c: _Ctx):
    A, B, C, D, S, T = (c.m[k] for k in "ABCDST")
    fsq, gsq = _fg_squares(c.p.factor_pair())
    rhs = 0.5 * psd_norm(sum(c.F(t) for t in _kitt_terms(c, fsq, gsq)))
    return w(A @ T @ B + C @ S @ D).map(c.phi), rhs


def _abs_prod(c: _Ctx, a: np.ndarray) -> np.ndarray:
    """|A| |A*|."""
    return mc.psd_power(c.gram(a), 0.5) @ mc.psd_power(c.cogram(a), 0.5)


@_bound(
    "T319",
    ["A"],
    ["phi", "alpha"],
    "phi(w^2(A)) <= 1/4 ||phi(|A|^2)+phi(|A*|^2)|| + alpha/2 ||phi(|Re(|A||A*|)|)|| + (1-alpha)/2 phi(w(A^2))",
    "Orlicz, alpha-weighted upper bound",
)
def _t319(c: _Ctx):
    a, al = c.m["A"], c.alpha
    rhs = (
        0.25 * psd_norm(c.F(c.gram(a)) + c.F(c.cogram(a)))
        + 0.5 * al * psd_norm(_abs_herm_fn(c.phi, _re(_abs_prod(c, a))))
        + 0.5 * (1 - al) * w(a @ a).map(c.phi)
    )
    return (w(a) ** 2).map(c.phi), rhs


@_bound(
    "T321",
    ["A"],
    ["phi", "alpha"],
    "phi(w^2(A)) <= 1/4 ||phi(|A|^2)+phi(|A*|^2)|| + alpha/2 ||phi(|A|)|| ||phi(|A*|)|| + (1-alpha)/2 phi(w(A^2)), phi submultiplicative",
    "Orlicz, sub-multiplicative phi",
    submultiplicative=True,
)
def _t321(c: _Ctx):
    a, al = c.m["A"], c.alpha
    f = lambda s: c.phi(np.sqrt(s))
    rhs = (
        0.25 * psd_norm(c.F(c.gram(a)) + c.F(c.cogram(a)))
        + 0.5 * al * psd_norm(mc.func_calc(f, c.gram(a))) * psd_norm(mc.func_calc(f, c.cogram(a)))
        + 0.5 * (1 - al) * w(a @ a).map(c.phi)
    )
    return (w(a) ** 2).map(c.phi), rhs


@_bound(
    "T322",
    ["A"],
    ["phi", "alpha"],
    "phi(w^2(sum A_i)) <= 1/(4n) ||sum phi(|nA_i|^2)+phi(|nA_i*|^2)|| + alpha/(2n) ||sum phi(|Re(n^2|A_i||A_i*|)|)|| + (1-alpha)/(2n) sum phi(n^2 w(A_i^2))",
    "Orlicz, sum with sub-multiplicative phi",
    family=True,
)
def _t322(c: _Ctx):
    fam, al = c.m["A"], c.alpha
    n = len(fam)
    first = sum(c.F(n * n * c.gram(a)) + c.F(n * n * c.cogram(a)) for a in fam)
    second = sum(_abs_herm_fn(c.phi, n * n * _re(_abs_prod(c, a))) for a in fam)
    third = sum((n * n * w(a @ a)).map(c.phi) for a in fam)
    rhs = psd_norm(first) / (4 * n) + al / (2 * n) * psd_norm(second) + (1 - al) / (2 * n) * third
    return (w(sum(fam)) ** 2).map(c.phi), rhs


@_bound("T323", ["A"], ["phi"], "phi(w^2(A)) <= 1/4 ||phi(|A|^2)+phi(|A*|^2)|| + 1/2 phi(w(|A||A*|))", "Orlicz form of Bhunia-Paul")
def _t323(c: _Ctx):
    a = c.m["A"]
    rhs = 0.25 * psd_norm(c.F(c.gram(a)) + c.F(c.cogram(a))) + 0.5 * w(_abs_prod(c, a)).map(c.phi)
    return (w(a) ** 2).map(c.phi), rhs


@_bound(
    "T324",
    ["A"],
    ["phi"],
    "phi(w^2(sum A_i)) <= 1/(4n) ||sum phi(n^2|A_i|^2)+phi(n^2|A_i*|^2)|| + 1/(2n) sum phi(w(n^2 |A_i||A_i*|))",
    "Orlicz form of Bhunia-Paul, finite sum",
    family=True,
)
def _t324(c: _Ctx):
    fam = c.m["A"]
    n = len(fam)
    first = sum(c.F(n * n * c.gram(a)) + c.F(n * n * c.cogram(a)) for a in fam)
    second = sum(w(n * n * _abs_prod(c, a)).map(c.phi) for a in fam)
    return (w(sum(fam)) ** 2).map(c.phi), psd_norm(first) / (4 * n) + second / (2 * n)


@_bound(
    "T41",
    ["P", "Q"],
    ["phi", "alpha"],
    "phi(w^2([[O,P],[Q,O]])) <= 1/4 max(||phi(|Q|^2)+phi(|P*|^2)||, ||phi(|P|^2)+phi(|Q*|^2)||) "
    "+ alpha/2 max(||phi(|Re(|Q||P*|)|)||, ||phi(|Re(|P||Q*|)|)||) + (1-alpha)/2 phi(max(w(PQ), w(QP)))",
    "Orlicz, off-diagonal block",
)
def _t41(c: _Ctx):
    P, Q, al = c.m["P"], c.m["Q"], c.alpha
    block = mc.block_compose(P, Q)
    absP, absQ = mc.psd_power(c.gram(P), 0.5), mc.psd_power(c.gram(Q), 0.5)
    absPs, absQs = mc.psd_power(c.cogram(P), 0.5), mc.psd_power(c.cogram(Q), 0.5)
    first = max(psd_norm(c.F(c.gram(Q)) + c.F(c.cogram(P))), psd_norm(c.F(c.gram(P)) + c.F(c.cogram(Q))))
    second = max(
        psd_norm(_abs_herm_fn(c.phi, _re(absQ @ absPs))),
        psd_norm(_abs_herm_fn(c.phi, _re(absP @ absQs))),
    )
    third = iv_max(w(P @ Q), w(Q @ P)).map(c.phi)
    rhs = 0.25 * first + 0.5 * al * second + 0.5 * (1 - al) * third
    return (w(block) ** 2).map(c.phi), rhs


# -- functional keys for tightness ranking -------------------------------------

_LHS_POWER = {
    "KITT03": 1, "KITT05U": 2, "AOK": 2, "T31": 2,
    "T34i": ("phi", 1), "T34ii": ("phi", 1), "T36i": ("phi", 2), "T36ii": ("phi", 2),
    "T38": ("phi", 2), "T319": ("phi", 2), "T321": ("phi", 2), "T323": ("phi", 2),
}


def _functional(bound_id: str, p: BoundParams) -> Optional[str]:
    if bound_id in ("HK1",):
        return _phi_key(None, p.r)
    if bound_id in ("HK2", "BP"):
        return _phi_key(None, 2 * p.r)
    spec = _LHS_POWER.get(bound_id)
    if spec is None:
        return None
    if isinstance(spec, tuple):
        return _phi_key(p.phi, spec[1])
    return _phi_key(None, spec)


# -- public API ---------------------------------------------------------------------


def list_bounds() -> list[BoundDescriptor]:
    return [d for d, _ in _CATALOG.values()]


def get_bound(bound_id: str) -> BoundDescriptor:
    try:
        return _CATALOG[bound_id][0]
    except KeyError:
        raise UnknownBound(f"unknown bound id {bound_id!r}") from None


def _as_family(x) -> list[np.ndarray]:
    if isinstance(x, np.ndarray) and x.ndim == 2:
        return [x]
    if isinstance(x, (list, tuple)) and x and not np.isscalar(x[0]) and np.asarray(x[0]).ndim == 2:
        return [mc.as_matrix(v) for v in x]
    return [mc.as_matrix(x)]


def check_params(desc: BoundDescriptor, params: BoundParams) -> BoundParams:
    """Validate per-bound parameter constraints; returns params with derived psi/alpha."""
    uses = desc.uses
    if "phi" in uses and params.phi is None:
        raise MissingInput(f"{desc.id} needs an Orlicz function phi")
    if "psi" in uses and params.psi is None:
        params = replace(params, psi=complement(params.phi))
    alpha = params.alpha
    if "alpha" in uses or ("fg" in uses and params.fg is None):
        lo, hi = desc.alpha_range
        if not (lo <= alpha <= hi) or (desc.alpha_open_low and alpha <= lo):
            bracket = "(" if desc.alpha_open_low else "["
            raise ParamOutOfRange(f"{desc.id} needs alpha in {bracket}{lo:g}, {hi:g}]; got {alpha:g}")
    if "r" in uses:
        if not params.r >= desc.r_min:
            raise ParamOutOfRange(f"{desc.id} needs r >= {desc.r_min:g}; got {params.r:g}")
        if desc.r_integer and params.r != int(params.r):
            raise ParamOutOfRange(f"{desc.id} needs an integer power; got {params.r:g}")
    if "fg" in uses:
        params.factor_pair().validate()
    if desc.submultiplicative and not submultiplicative_probe(params.phi):
        raise NotSubmultiplicative(f"{params.phi.id} fails the sub-multiplicativity probe")
    return params


def _check_inputs(desc: BoundDescriptor, matrices: Mapping) -> dict:
    m = {}
    for role in desc.inputs:
        if role not in matrices or matrices[role] is None:
            continue
        fam = _as_family(matrices[role])
        m[role] = fam if desc.family else (fam[0] if len(fam) == 1 else None)
        if m[role] is None:
            raise DimensionMismatch(f"{desc.id} takes a single matrix for {role}")
    # sign conditions on the inputs that are present are reported first
    for role in desc.psd_inputs:
        if role in m and not all(mc.is_psd(x) for x in _as_family(m[role])):
            raise NotPSD(f"{desc.id} needs {role} >= 0")
    for role in desc.contraction_inputs:
        if role in m and any(mc.operator_norm(x) > 1.0 + 1e-12 for x in _as_family(m[role])):
            raise NotContraction(f"{desc.id} needs ||{role}|| <= 1")
    for role in desc.inputs:
        if role not in m:
            raise MissingInput(f"{desc.id} needs input {role}")
    flat = [x for role in desc.inputs for x in (m[role] if desc.family else [m[role]])]
    if len({x.shape for x in flat}) != 1:
        raise DimensionMismatch(f"{desc.id}: inputs differ in dimension")
    if desc.family and len({len(m[role]) for role in desc.inputs}) != 1:
        raise DimensionMismatch(f"{desc.id}: families differ in length")
    if desc.commuting:
        a, b = m[desc.inputs[0]], m[desc.inputs[1]]
        comm = mc.operator_norm(a @ b - b @ a)
        if comm > 1e-10 * max(1.0, mc.operator_norm(a) * mc.operator_norm(b)):
            raise NotCommuting(f"{desc.id} needs commuting inputs (||AB - BA|| = {comm:.3e})")
    return m


def evaluate_bound(
    bound_id: str,
    matrices: Mapping,
    params: BoundParams = BoundParams(),
    slack_tol: float = SLACK_RTOL,
) -> BoundReport:
    """Evaluate one inequality on the given inputs.

    Raises the precondition errors (``UnknownBound``, ``MissingInput``,
    ``ParamOutOfRange``, ``NotPSD``, ``NotContraction``,
    ``NotSubmultiplicative``, ...). Overflow of an Orlicz function is not an
    error: the report comes back with verdict ``overflow``.
    """
    desc = get_bound(bound_id)
    fn = _CATALOG[bound_id][1]
    m = _check_inputs(desc, matrices)
    params = check_params(desc, params)
    if desc.family:
        params = replace(params, n=len(m[desc.inputs[0]]))
    alpha = params.alpha
    if desc.clamp_alpha:
        alpha = min(max(alpha, ALPHA_CLAMP), 1.0 - ALPHA_CLAMP)
    key = _functional(bound_id, params)
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            lhs, rhs = fn(_Ctx(m, params, alpha))
    except OverflowError:
        return BoundReport(bound_id, params, math.inf, math.inf, math.nan, math.inf, "overflow", key)
    return make_report(bound_id, params, Iv.of(lhs), Iv.of(rhs), slack_tol, key)


def make_report(bound_id, params, lhs: Iv, rhs: Iv, slack_tol: float = SLACK_RTOL, functional=None) -> BoundReport:
    if not (lhs.finite() and rhs.finite()):
        return BoundReport(bound_id, params, lhs.mid, rhs.mid, math.nan, math.inf, "overflow", functional)
    l, r = lhs.mid, rhs.mid
    slack = r - l
    scale = max(1.0, abs(l), abs(r))
    budget = lhs.half + rhs.half + (ARITH_RTOL + slack_tol) * scale
    if slack < -budget:
        verdict = "violated"
    elif abs(slack) <= budget:
        verdict = "tight"
    else:
        verdict = "holds"
    return BoundReport(bound_id, params, l, r, slack, budget, verdict, functional)


def tightness_rank(a, ids: Sequence[str], params: BoundParams = BoundParams()) -> list[tuple[str, float]]:
    """Sort bounds on the same left-hand functional by right-hand side (ties by id)."""
    reports = []
    for bid in ids:
        get_bound(bid)
        reports.append(evaluate_bound(bid, {"A": a}, params))
    keys = {rep.functional for rep in reports}
    if None in keys or len(keys) != 1:
        raise IncomparableBounds(f"bounds {list(ids)} bound different quantities: {sorted(map(str, keys))}")
    return sorted(((rep.bound_id, rep.rhs) for rep in reports), key=lambda t: (t[1], t[0]))


# -- specialization coherence -----------------------------------------------------

COHERENCE_RTOL = 1e-9


@dataclass(frozen=True)
class CoherenceResult:
    name: str
    rhs_bound: float
    rhs_reference: float

    @property
    def discrepancy(self) -> float:
        return abs(self.rhs_bound - self.rhs_reference)

    @property
    def relative(self) -> float:
        return self.discrepancy / max(1.0, abs(self.rhs_bound), abs(self.rhs_reference))

    @property
    def ok(self) -> bool:
        return self.relative <= COHERENCE_RTOL


def coherence_checks(
    a: np.ndarray,
    family: Mapping[str, Sequence[np.ndarray]],
    p: np.ndarray,
    q: np.ndarray,
    alpha: float = 0.5,
    r: float = 2.0,
) -> list[CoherenceResult]:
    """Orlicz entries specialized to power functions against their classical forms.

    ``family`` holds equal-length lists under ``A``, ``B``, ``X`` for the sum bound.
    """
    from .orlicz import power

    one, two, pr = power(1.0), power(2.0), power(r)
    out = []

    rep = evaluate_bound("T34i", {"A": a}, BoundParams(phi=one))
    direct = 0.5 * psd_norm(mc.abs_value(a) + mc.abs_value(mc.adjoint(a)))
    out.append(CoherenceResult("T34i(power:1) ~ 1/2|||A|+|A*|||", rep.rhs, direct))

    rep = evaluate_bound("T34i", {"A": a}, BoundParams(phi=two))
    out.append(CoherenceResult("T34i(power:2) ~ KITT05U", rep.rhs, evaluate_bound("KITT05U", {"A": a}).rhs))

    rep = evaluate_bound("T36ii", {"A": a}, BoundParams(phi=pr, alpha=alpha))
    ref = evaluate_bound("HK2", {"A": a}, BoundParams(alpha=alpha, r=r))
    out.append(CoherenceResult(f"T36ii(power:{fmt_param(r)}) ~ HK2", rep.rhs, ref.rhs))

    rep = evaluate_bound("T38", {"A": a}, BoundParams(phi=one))
    out.append(CoherenceResult("T38(power:1) ~ AOK", rep.rhs, evaluate_bound("AOK", {"A": a}).rhs))

    fam = {k: list(family[k]) for k in ("A", "B", "X")}
    n = len(fam["A"])
    rep = evaluate_bound("T316", fam, BoundParams(phi=pr, alpha=alpha))
    z = 0
    for A, B, X in zip(fam["A"], fam["B"], fam["X"]):
        m = np.conj(B).T @ mc.psd_power(np.conj(X).T @ X, alpha) @ B
        k = np.conj(A).T @ mc.psd_power(X @ np.conj(X).T, 1 - alpha) @ A
        z = z + mc.psd_power(_herm(m), r) + 1j * mc.psd_power(_herm(k), r)
    ref = n ** (r - 1) / math.sqrt(2.0) * w(z).mid
    out.append(CoherenceResult(f"T316(power:{fmt_param(r)}) ~ power sum form", rep.rhs, ref))

    rep = evaluate_bound("T41", {"P": p, "Q": q}, BoundParams(phi=one, alpha=1.0))
    ap, aq = mc.abs_value(p), mc.abs_value(q)
    aps, aqs = mc.abs_value(mc.adjoint(p)), mc.abs_value(mc.adjoint(q))
    first = max(psd_norm(aq @ aq + aps @ aps), psd_norm(ap @ ap + aqs @ aqs))
    second = max(mc.operator_norm(_re(aq @ aps)), mc.operator_norm(_re(ap @ aqs)))
    out.append(CoherenceResult("T41(power:1, alpha=1) ~ block max form", rep.rhs, 0.25 * first + 0.5 * second))
    return out
