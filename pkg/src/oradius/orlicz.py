"""Orlicz functions, kernels and complementary (convex-conjugate) functions.

An :class:`OrliczFunction` wraps a vectorised evaluator on [0, inf). Values
that do not fit in a double come back as ``inf``; that is the overflow
sentinel, never a saturated finite number.

Built-in families, addressed by the CLI specifier grammar ``family:param``:

========== ======================= ==========
specifier  phi(t)                  admissible
========== ======================= ==========
power:R    t**R                    R >= 1
pnorm:P    t**P / P                P > 1
exppow:R   exp(t**R) - 1           R > 1
logtemp:P  t**P / ln(e + t)        P >= 2
========== ======================= ==========
"""
from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    DomainError,
    MaximizerUnbounded,
    NegativeArgument,
    NotConvex,
    SpecifierError,
)

ArrayFn = Callable[[np.ndarray], np.ndarray]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
BRACKET_LIMIT = 1e12
CONJUGATE_RTOL = 1e-10


def default_grid() -> np.ndarray:
    """64 log-spaced probe points on [1e-3, 50]."""
    return np.geomspace(1e-3, 50.0, 64)


def fmt_param(x: float) -> str:
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


@dataclass(frozen=True)
class OrliczFunction:
    id: str
    func: ArrayFn = field(compare=False, repr=False)
    kernel_func: Optional[ArrayFn] = field(default=None, compare=False, repr=False)
    closed_complement: Optional[Callable[[], "OrliczFunction"]] = field(
        default=None, compare=False, repr=False
    )
    submultiplicative: Optional[bool] = field(default=None, compare=False)
    params: tuple = ()

    def __call__(self, u):
        """Vectorised evaluation; negative inputs raise."""
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise NegativeArgument(f"{self.id} evaluated at a negative argument")
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(self.func(arr), dtype=float)
        out = np.where(np.isnan(out), np.inf, out)
        return out if out.ndim else float(out)

    def kernel(self, u):
        if self.kernel_func is None:
            raise DomainError(f"{self.id} has no kernel")
        arr = np.asarray(u, dtype=float)
        if np.any(arr < 0):
            raise NegativeArgument(f"kernel of {self.id} evaluated at a negative argument")
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(self.kernel_func(arr), dtype=float)
        return out if out.ndim else float(out)

    @property
    def has_kernel(self) -> bool:
        return self.kernel_func is not None

    def param(self, name: str) -> float:
        return dict(self.params)[name]

    def __str__(self) -> str:
        return self.id


def _power(t, r):
    return np.power(t, r)


def power(r: float) -> OrliczFunction:
    r = float(r)
    if not r >= 1.0:
        raise DomainError(f"power:{r} needs r >= 1")
    return OrliczFunction(
        id=f"power:{fmt_param(r)}",
        func=lambda t: np.power(t, r),
        kernel_func=lambda t: r * np.power(t, r - 1.0) if r != 1.0 else np.ones_like(t),
        submultiplicative=True,
        params=(("r", r),),
    )


def power_normalized(p: float) -> OrliczFunction:
    p = float(p)
    if not p > 1.0:
        raise DomainError(f"pnorm:{p} needs p > 1")
    q = p / (p - 1.0)
    return OrliczFunction(
        id=f"pnorm:{fmt_param(p)}",
        func=lambda t: np.power(t, p) / p,
        kernel_func=lambda t: np.power(t, p - 1.0),
        closed_complement=lambda: power_normalized(q),
        submultiplicative=False,
        params=(("p", p),),
    )


def exp_power(r: float) -> OrliczFunction:
    r = float(r)
    if not r > 1.0:
        raise DomainError(f"exppow:{r} needs r > 1")

    def kern(t):
        tr = np.power(t, r)
        return r * np.power(t, r - 1.0) * np.exp(tr)

    return OrliczFunction(
        id=f"exppow:{fmt_param(r)}",
        func=lambda t: np.expm1(np.power(t, r)),
        kernel_func=kern,
        params=(("r", r),),
    )


def log_tempered(p: float) -> OrliczFunction:
    p = float(p)
    if not p >= 2.0:
        raise DomainError(f"logtemp:{p} needs p >= 2")

    def kern(t):
        lg = np.log(np.e + t)
        return p * np.power(t, p - 1.0) / lg - np.power(t, p) / ((np.e + t) * lg * lg)

    return OrliczFunction(
        id=f"logtemp:{fmt_param(p)}",
        func=lambda t: np.power(t, p) / np.log(np.e + t),
        kernel_func=kern,
        submultiplicative=False,
        params=(("p", p),),
    )


FAMILIES = {
    "power": power,
    "pnorm": power_normalized,
    "exppow": exp_power,
    "logtemp": log_tempered,
}

_SPEC_RE = re.compile(r"^(power|pnorm|exppow|logtemp):([0-9]+(?:\.[0-9]+)?)$")


def parse_phi(spec: str) -> OrliczFunction:
    """Parse ``family:decimal`` (e.g. ``pnorm:2.0``) into a catalog function."""
    m = _SPEC_RE.match(spec.strip())
    if not m:
        raise SpecifierError(f"bad Orlicz specifier {spec!r}; expected power:R, pnorm:P, exppow:R or logtemp:P")
    try:
        return FAMILIES[m.group(1)](float(m.group(2)))
    except DomainError as exc:
        raise SpecifierError(str(exc)) from exc


def evaluate(phi: OrliczFunction, u: float) -> float:
    """Scalar evaluation; ``math.inf`` flags overflow."""
    if u < 0:
        raise NegativeArgument(f"{phi.id} evaluated at {u}")
    return float(phi(u))


# -- convexity / non-degeneracy probes ---------------------------------------


def probe_invariants(phi: OrliczFunction, grid: Optional[np.ndarray] = None) -> None:
    """Raise if phi fails phi(0)=0, positivity, monotonicity or midpoint convexity."""
    g = np.concatenate([[0.0], default_grid() if grid is None else np.asarray(grid, float)])
    g = np.unique(g)
    vals = phi(g)
    if vals[0] != 0.0:
        raise DomainError(f"{phi.id}: phi(0) = {vals[0]} != 0")
    finite = np.isfinite(vals)
    if np.any(vals[1:] <= 0.0):
        raise DomainError(f"{phi.id} vanishes at a positive argument (degenerate)")
    v = vals[finite]
    scale = np.maximum(1.0, np.abs(v))
    if np.any(np.diff(v) < -1e-12 * scale[1:]):
        raise NotConvex(f"{phi.id} is not nondecreasing on the probe grid")
    u = g[finite]
    mid = phi(0.5 * (u[:-1] + u[1:]))
    avg = 0.5 * (v[:-1] + v[1:])
    if np.any(mid > avg + 1e-12 * np.maximum(1.0, avg)):
        raise NotConvex(f"{phi.id} fails the midpoint convexity test")
    wide_mid = phi(0.5 * (u[0] + u))
    wide_avg = 0.5 * (v[0] + v)
    if np.any(wide_mid > wide_avg + 1e-12 * np.maximum(1.0, wide_avg)):
        raise NotConvex(f"{phi.id} fails the midpoint convexity test")


# -- convex conjugate ---------------------------------------------------------


def _golden_max(g: Callable[[float], float], a: float, b: float, xtol: float) -> tuple[float, float]:
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    while b - a > xtol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - GOLDEN * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + GOLDEN * (b - a)
            gd = g(d)
    return (c, gc) if gc >= gd else (d, gd)


def conjugate_value(phi: OrliczFunction, v: float) -> float:
    """sup_{u >= 0} (u v - phi(u)) by bracket expansion and golden section."""
    if v < 0:
        raise NegativeArgument(f"conjugate of {phi.id} evaluated at {v}")
    if v == 0.0:
        return 0.0

    def g(u: float) -> float:
        return u * v - float(phi(u))

    u = 1.0
    gu = g(u)
    if g(2.0 * u) > gu:
        while True:
            u *= 2.0
            if u > BRACKET_LIMIT:
                raise MaximizerUnbounded(f"conjugate of {phi.id} at v={v} has no finite maximiser")
            gu, gnext = g(u), g(2.0 * u)
            if gnext <= gu:
                break
    else:
        while u > 1e-300 and g(0.5 * u) >= gu:
            u *= 0.5
            gu = g(u)
        if u <= 1e-300:
            return max(0.0, gu)
    best_u, best = _golden_max(g, 0.5 * u, 2.0 * u, xtol=1e-13 * u)
    return max(0.0, best, gu)


def numeric_complement(phi: OrliczFunction) -> OrliczFunction:
    def func(v):
        v = np.asarray(v, dtype=float)
        flat = [conjugate_value(phi, float(x)) for x in v.ravel()]
        return np.asarray(flat, dtype=float).reshape(v.shape)

    return OrliczFunction(id=f"conj({phi.id})", func=func, params=(("of", phi.id),))


@functools.lru_cache(maxsize=64)
def complement(phi: OrliczFunction) -> OrliczFunction:
    """Complementary Orlicz function: closed form when known, else numeric conjugate."""
    probe_invariants(phi)
    if phi.closed_complement is not None:
        return phi.closed_complement()
    return numeric_complement(phi)


# -- scalar lemma machinery ---------------------------------------------------


def young_gap(phi: OrliczFunction, u: float, v: float, psi: Optional[OrliczFunction] = None) -> float:
    """phi(u) + psi(v) - u v; nonnegative for a complementary pair."""
    if u < 0 or v < 0:
        raise NegativeArgument("young_gap needs u, v >= 0")
    psi = complement(phi) if psi is None else psi
    return evaluate(phi, u) + evaluate(psi, v) - u * v


def bohr_check(phi: OrliczFunction, a) -> bool:
    """phi(mean(a)) <= mean(phi(a)) up to 1e-10 * scale."""
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise NegativeArgument("bohr_check needs a_i >= 0")
    lhs = evaluate(phi, float(np.mean(a)))
    rhs = float(np.mean(phi(a)))
    return lhs <= rhs + 1e-10 * max(1.0, abs(rhs))


def scaling_check(phi: OrliczFunction, alpha: float, u: float) -> bool:
    """phi(alpha u) <= alpha phi(u) for alpha in [0, 1]."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError("alpha must lie in [0, 1]")
    if u < 0:
        raise NegativeArgument("scaling_check needs u >= 0")
    rhs = alpha * evaluate(phi, u)
    return evaluate(phi, alpha * u) <= rhs + 1e-12 * max(1.0, abs(rhs))


@functools.lru_cache(maxsize=64)
def _submult_default(phi: OrliczFunction) -> bool:
    return submultiplicative_probe(phi, default_grid())


def submultiplicative_probe(phi: OrliczFunction, grid=None) -> bool:
    """phi(uv) <= phi(u) phi(v) for every pair of grid points."""
    if grid is None:
        return _submult_default(phi)
    g = np.asarray(grid, dtype=float)
    if np.any(g < 0):
        raise NegativeArgument("probe grid must be nonnegative")
    vals = phi(g)
    with np.errstate(over="ignore", invalid="ignore"):
        prod = np.outer(vals, vals)
    prod = np.where(np.isnan(prod), 0.0, prod)
    lhs = phi(np.outer(g, g))
    return bool(np.all(lhs <= prod + 1e-10 * np.maximum(1.0, np.abs(prod))))
