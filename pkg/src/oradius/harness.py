"""Random-ensemble campaigns, lemma probes and witness search.

Seeds: every derived seed is ``mix(master, i, j, ...)``, a left fold of the
splitmix64 finalizer over the 64-bit words ``master, i, j, ...``:
``h = splitmix64(master); h = splitmix64(h ^ i); ...``. Per-trial streams
therefore depend only on the master seed and the trial index.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import __version__
from . import matrix_core as mc
from .bounds import (
    BoundParams,
    BoundReport,
    coherence_checks,
    evaluate_bound,
    get_bound,
    list_bounds,
    power_pair,
)
from .errors import ManifestError, MaximizerUnbounded, OradiusError, UnknownEnsemble
from .orlicz import (
    OrliczFunction,
    bohr_check,
    complement,
    fmt_param,
    parse_phi,
    submultiplicative_probe,
    young_gap,
)

MASK64 = (1 << 64) - 1
ENSEMBLES = ("ginibre", "hermitian", "normal", "nilpotent", "psd", "contraction", "commuting-pair", "block-pair")
PAIR_ENSEMBLES = ("commuting-pair", "block-pair")
DEFAULT_PHIS = ("power:1", "power:2", "pnorm:2", "pnorm:3", "exppow:2", "logtemp:2")
DEFAULT_ALPHAS = (0.25, 0.5, 0.75)
DEFAULT_RS = (1.0, 2.0, 3.0)
CSV_COLUMNS = ("bound_id", "n", "alpha", "r", "phi", "lhs", "rhs", "slack", "budget", "verdict")
ORDERING_RTOL = 1e-9
LEMMA_RTOL = 1e-9
YOUNG_EQ_RTOL = 1e-8
# near a kink about half of all small steps fail, so halving on every failure
# shrinks sigma faster than the distance to the minimum
WITNESS_PATIENCE = 16

# role -> stream index, fixed so that base matrices are shared across bounds
_ROLE_STREAM = {r: i for i, r in enumerate("ABCDSTXPQ")}
_PAIR_STREAM = 64
_PARAM_STREAM = 128


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix(master: int, *words: int) -> int:
    h = splitmix64(master & MASK64)
    for w_ in words:
        h = splitmix64(h ^ (w_ & MASK64))
    return h


# -- ensembles -----------------------------------------------------------------


def _ginibre(n: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def _poly3(m: np.ndarray, c: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    return c[0] * np.eye(n) + c[1] * m + c[2] * (m @ m) + c[3] * (m @ m @ m)


def gen_matrix(ensemble: str, n: int, seed: int):
    """Deterministic random matrix (or pair, for pair ensembles) of dimension n."""
    if ensemble not in ENSEMBLES:
        raise UnknownEnsemble(f"unknown ensemble {ensemble!r}; known: {', '.join(ENSEMBLES)}")
    rng = np.random.default_rng(seed & MASK64)
    g = _ginibre(n, rng)
    if ensemble == "ginibre":
        return g
    if ensemble == "hermitian":
        return 0.5 * (g + np.conj(g).T)
    if ensemble == "normal":
        u = mc.random_unitary(n, rng)
        z = _ginibre(1, rng).ravel() if n == 1 else (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
        return (u * z) @ np.conj(u).T
    if ensemble == "nilpotent":
        return np.triu(g, 1)
    if ensemble == "psd":
        return np.conj(g).T @ g
    if ensemble == "contraction":
        return g / (mc.operator_norm(g) + 1e-6)
    if ensemble == "commuting-pair":
        c = (rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))) / math.sqrt(2.0)
        return _poly3(g, c[0]), _poly3(g, c[1])
    return g, _ginibre(n, rng)


# -- lemma probes ----------------------------------------------------------------


@dataclass(frozen=True)
class LemmaProbeReport:
    lemma_id: str
    samples: int
    failures: int
    worst_margin: float  # min over samples of (rhs - lhs) / scale

    @property
    def ok(self) -> bool:
        return self.failures == 0


LEMMAS = ("L21", "L22", "L23", "L24", "L25", "L26", "L27")


def _unit(n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _qf(h: np.ndarray, x: np.ndarray) -> float:
    return float(np.real(np.vdot(x, h @ x)))


def _probe_phi(rng: np.random.Generator) -> OrliczFunction:
    return parse_phi(DEFAULT_PHIS[rng.integers(len(DEFAULT_PHIS))])


def _psd_sample(n: int, rng: np.random.Generator, top: float = 3.0) -> np.ndarray:
    g = _ginibre(n, rng)
    h = np.conj(g).T @ g
    return h * (rng.uniform(0.0, top) / max(mc.operator_norm(h), 1e-300))


def _lemma_sample(lemma_id: str, rng: np.random.Generator) -> tuple[float, float]:
    """One (lhs, rhs) pair of the scalar inequality lhs <= rhs."""
    n = int(rng.integers(1, 7))
    if lemma_id == "L21":
        phi, h, x = _probe_phi(rng), _psd_sample(n, rng), _unit(n, rng)
        return float(phi(max(0.0, _qf(h, x)))), _qf(mc.func_calc(phi, h), x)
    if lemma_id == "L22":
        h, x, r = _psd_sample(n, rng), _unit(n, rng), float(rng.uniform(1.0, 4.0))
        return max(0.0, _qf(h, x)) ** r, _qf(mc.psd_power(h, r), x)
    if lemma_id in ("L23", "L24"):
        a = _ginibre(n, rng) * rng.uniform(0.1, 3.0)
        x = _unit(n, rng) * rng.uniform(0.1, 2.0)
        y = _unit(n, rng) * rng.uniform(0.1, 2.0)
        alpha = float(rng.uniform(0.0, 1.0))
        if lemma_id == "L23":
            fg = power_pair(alpha) if rng.integers(2) else _sqrt_pair()
            fa = mc.func_calc(lambda s: np.asarray(fg.f(np.sqrt(s))), np.conj(a).T @ a)
            ga = mc.func_calc(lambda s: np.asarray(fg.g(np.sqrt(s))), a @ np.conj(a).T)
            return abs(np.vdot(y, a @ x)), float(np.linalg.norm(fa @ x) * np.linalg.norm(ga @ y))
        lhs = abs(np.vdot(y, a @ x)) ** 2
        rhs = _qf(mc.psd_power(np.conj(a).T @ a, alpha), x) * _qf(mc.psd_power(a @ np.conj(a).T, 1 - alpha), y)
        return lhs, rhs
    if lemma_id == "L25":
        x = _unit(n, rng) * rng.uniform(0.0, 3.0)
        y = _unit(n, rng) * rng.uniform(0.0, 3.0)
        e = _unit(n, rng)
        if rng.integers(4) == 0:
            y = x * rng.uniform(0.1, 2.0)
        lhs = abs(np.vdot(e, x) * np.vdot(y, e))
        return lhs, 0.5 * (np.linalg.norm(x) * np.linalg.norm(y) + abs(np.vdot(y, x)))
    if lemma_id == "L26":
        phi = parse_phi(("power:2", "pnorm:2", "pnorm:3", "pnorm:1.5", "exppow:2", "logtemp:2")[rng.integers(6)])
        u = float(rng.uniform(0.0, 3.0))
        if rng.integers(2):
            v = float(phi.kernel(u))
            gap = young_gap(phi, u, v)
            scale = max(1.0, u * v)
            # equality condition: the gap must vanish, not merely be nonnegative
            return abs(gap), YOUNG_EQ_RTOL * scale
        v = float(rng.uniform(0.0, 3.0))
        return u * v, float(phi(u)) + float(complement(phi)(v))
    if lemma_id == "L27":
        phi = _probe_phi(rng)
        a = rng.uniform(0.0, 3.0, size=int(rng.integers(1, 9)))
        if rng.integers(2):
            if not bohr_check(phi, a):
                return math.inf, 0.0
            return float(phi(float(np.mean(a)))), float(np.mean(phi(a)))
        # scaling property phi(t u) <= t phi(u) for t in [0, 1]
        t, u = float(rng.uniform(0, 1)), float(rng.uniform(0, 3))
        return float(phi(t * u)), t * float(phi(u))
    raise ValueError(f"unknown lemma id {lemma_id!r}")


def _sqrt_pair():
    from .bounds import FactorPair

    return FactorPair("sqrt", np.sqrt, np.sqrt)


def lemma_probe(lemma_id: str, seed: int = 0, samples: int = 10_000) -> LemmaProbeReport:
    """Check one background inequality on random samples at tolerance 1e-9 * scale."""
    if lemma_id not in LEMMAS:
        raise ValueError(f"unknown lemma id {lemma_id!r}; known: {', '.join(LEMMAS)}")
    rng = np.random.default_rng(mix(seed, LEMMAS.index(lemma_id)))
    failures, worst = 0, math.inf
    for _ in range(samples):
        lhs, rhs = _lemma_sample(lemma_id, rng)
        scale = max(1.0, abs(lhs), abs(rhs))
        margin = (rhs - lhs) / scale
        worst = min(worst, margin)
        if margin < -LEMMA_RTOL:
            failures += 1
    return LemmaProbeReport(lemma_id, samples, failures, worst)


# -- campaigns --------------------------------------------------------------------


@dataclass(frozen=True)
class CampaignConfig:
    master_seed: int = 1
    trials: int = 1000
    dims: tuple[int, int] = (2, 8)
    ensembles: tuple[str, ...] = ("ginibre", "hermitian", "normal", "nilpotent", "psd", "contraction")
    bound_ids: tuple[str, ...] = ()  # empty = whole catalog
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    rs: tuple[float, ...] = DEFAULT_RS
    phis: tuple[str, ...] = DEFAULT_PHIS
    coherence_trials: int = 100
    family_size: int = 2
    slack_tol: float = 1e-7

    def resolved_bounds(self) -> tuple[str, ...]:
        return self.bound_ids or tuple(d.id for d in list_bounds())

    def validate(self) -> None:
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ManifestError(f"trials must be a positive integer; got {self.trials!r}")
        lo, hi = self.dims
        if not (1 <= lo <= hi <= 64):
            raise ManifestError(f"dims must satisfy 1 <= lo <= hi <= 64; got {lo}-{hi}")
        if not self.ensembles:
            raise ManifestError("no ensembles configured")
        for e in self.ensembles:
            if e not in ENSEMBLES:
                raise ManifestError(f"unknown ensemble {e!r}")
        for b in self.resolved_bounds():
            try:
                get_bound(b)
            except OradiusError as exc:
                raise ManifestError(str(exc)) from None
        for s in self.phis:
            try:
                parse_phi(s)
            except OradiusError as exc:
                raise ManifestError(str(exc)) from None
        if not self.phis or not self.alphas or not self.rs:
            raise ManifestError("phi, alpha and r lists must be nonempty")
        if any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise ManifestError("alpha values must lie in [0, 1]")
        if any(not r >= 1.0 for r in self.rs):
            raise ManifestError("r values must be >= 1")
        if self.family_size < 1 or self.coherence_trials < 0:
            raise ManifestError("family_size >= 1 and coherence_trials >= 0 required")


@dataclass
class BoundAggregate:
    evaluated: int = 0
    skipped: int = 0
    tight_count: int = 0
    overflow_count: int = 0
    violation_count: int = 0
    min_slack: float = math.inf
    slack_sum: float = 0.0
    slack_n: int = 0
    worst_input_ref: Optional[str] = None
    skip_reasons: Counter = field(default_factory=Counter)

    @property
    def mean_slack(self) -> Optional[float]:
        return self.slack_sum / self.slack_n if self.slack_n else None

    def add(self, rep: BoundReport, ref: str) -> None:
        self.evaluated += 1
        if rep.verdict == "overflow":
            self.overflow_count += 1
            return
        self.tight_count += rep.verdict == "tight"
        self.violation_count += rep.verdict == "violated"
        self.slack_sum += rep.slack
        self.slack_n += 1
        if rep.slack < self.min_slack:
            self.min_slack = rep.slack
            self.worst_input_ref = ref

    def as_dict(self) -> dict:
        return {
            "evaluated": self.evaluated,
            "skipped": self.skipped,
            "skip_reasons": dict(sorted(self.skip_reasons.items())),
            "min_slack": self.min_slack if self.slack_n else None,
            "mean_slack": self.mean_slack,
            "tight_count": self.tight_count,
            "overflow_count": self.overflow_count,
            "violation_count": self.violation_count,
            "worst_input_ref": self.worst_input_ref,
        }


@dataclass
class CampaignReport:
    config: CampaignConfig
    per_bound: dict[str, BoundAggregate]
    rows: list[BoundReport]
    ordering_failures: list[str]
    coherence_failures: list[str]
    coherence_checked: int
    max_coherence_discrepancy: float

    @property
    def violation_count(self) -> int:
        return sum(a.violation_count for a in self.per_bound.values())

    @property
    def stamp(self) -> dict:
        return {"seed": self.config.master_seed, "version": __version__}

    def summary(self) -> dict:
        """Bound ids map to their aggregates; lowercase keys hold campaign-level data."""
        out = {k: v.as_dict() for k, v in self.per_bound.items()}
        out["stamp"] = self.stamp
        out["campaign"] = {
            "trials": self.config.trials,
            "violation_count": self.violation_count,
            "ordering_failures": self.ordering_failures,
            "coherence_checked": self.coherence_checked,
            "coherence_failures": self.coherence_failures,
            "max_coherence_discrepancy": self.max_coherence_discrepancy,
        }
        return out


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    return "%.17g" % x


def report_row(rep: BoundReport) -> list[str]:
    """CSV fields; parameters a bound does not use are left empty."""
    uses = get_bound(rep.bound_id).uses
    p = rep.params
    alpha = p.alpha if ("alpha" in uses or "fg" in uses) else ""
    return [
        rep.bound_id,
        str(p.n),
        _fmt(alpha),
        _fmt(p.r if "r" in uses else ""),
        p.phi.id if ("phi" in uses and p.phi is not None) else "",
        _fmt(rep.lhs),
        _fmt(rep.rhs),
        _fmt(rep.slack),
        _fmt(rep.error_budget),
        rep.verdict,
    ]


def format_csv(rows: Sequence[Sequence[str]], header: Sequence[str] = CSV_COLUMNS) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    if header:
        wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def write_atomic(path: str, text: str) -> None:
    """Write to a temporary file beside ``path`` then rename over it."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _json_clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_clean(v) for v in x]
    return x


def campaign_csv(report: CampaignReport) -> str:
    return format_csv([report_row(r) for r in report.rows])


def summary_json(report: CampaignReport) -> str:
    return json.dumps(_json_clean(report.summary()), indent=2, sort_keys=True) + "\n"


def write_campaign(report: CampaignReport, out_dir: str) -> tuple[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    json_path = os.path.join(out_dir, "summary.json")
    write_atomic(csv_path, campaign_csv(report))
    write_atomic(json_path, summary_json(report))
    return csv_path, json_path


class _TrialInputs:
    """Lazily generated, cached inputs for one trial."""

    def __init__(self, trial_seed: int, ensemble: str, n: int):
        self.seed, self.ensemble, self.n = trial_seed, ensemble, n
        self._cache: dict = {}

    def get(self, role: str, ensemble: Optional[str] = None, k: int = 0) -> np.ndarray:
        ens = ensemble or self.ensemble
        key = (role, ens, k)
        if key not in self._cache:
            m = gen_matrix(ens, self.n, mix(self.seed, _ROLE_STREAM[role], k))
            self._cache[key] = m[0] if isinstance(m, tuple) else m
        return self._cache[key]

    def pair(self, ensemble: str) -> tuple[np.ndarray, np.ndarray]:
        key = ("pair", ensemble)
        if key not in self._cache:
            self._cache[key] = gen_matrix(ensemble, self.n, mix(self.seed, _PAIR_STREAM, ENSEMBLES.index(ensemble)))
        return self._cache[key]


def bound_inputs(bound_id: str, t: _TrialInputs, family_size: int = 2) -> dict:
    desc = get_bound(bound_id)
    if desc.commuting:
        a, b = t.pair("commuting-pair")
        return {desc.inputs[0]: a, desc.inputs[1]: b}
    if bound_id == "T41" and t.ensemble == "block-pair":
        p, q = t.pair("block-pair")
        return {"P": p, "Q": q}
    out = {}
    for role in desc.inputs:
        ens = None
        if role in desc.psd_inputs:
            ens = "psd"
        elif role in desc.contraction_inputs:
            ens = "contraction"
        if desc.family:
            out[role] = [t.get(role, ens, k) for k in range(family_size)]
        else:
            out[role] = t.get(role, ens)
    return out


def _has_bounded_complement(phi: OrliczFunction) -> bool:
    try:
        complement(phi)(np.array([1e3]))
    except MaximizerUnbounded:
        return False
    return True


def admissible_grid(bound_id: str, phis: Sequence[OrliczFunction], alphas, rs):
    """Grid values a bound accepts; (phis, alphas, rs) each possibly empty."""
    desc = get_bound(bound_id)
    lo, hi = desc.alpha_range
    al = [a for a in alphas if lo <= a <= hi and not (desc.alpha_open_low and a <= lo)]
    rr = [r for r in rs if r >= desc.r_min and (not desc.r_integer or r == int(r))]
    ph = list(phis)
    if "psi" in desc.uses:
        ph = [p for p in ph if _has_bounded_complement(p)]
    if desc.submultiplicative:
        ph = [p for p in ph if submultiplicative_probe(p)]
    return ph, al, rr


def draw_params(bound_id: str, rng: np.random.Generator, phis, alphas, rs) -> Optional[BoundParams]:
    desc = get_bound(bound_id)
    ph, al, rr = admissible_grid(bound_id, phis, alphas, rs)
    ia, ir, ip = (int(rng.integers(1 << 30)) for _ in range(3))
    needs = desc.uses
    if ("alpha" in needs or "fg" in needs) and not al:
        return None
    if "r" in needs and not rr:
        return None
    if "phi" in needs and not ph:
        return None
    return BoundParams(
        alpha=al[ia % len(al)] if al else 0.5,
        r=rr[ir % len(rr)] if rr else 1.0,
        phi=ph[ip % len(ph)] if ("phi" in needs and ph) else None,
    )


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Evaluate every configured bound on every trial; a pure function of the config."""
    config.validate()
    bounds = config.resolved_bounds()
    catalog_index = {d.id: i for i, d in enumerate(list_bounds())}
    phis = [parse_phi(s) for s in config.phis]
    agg = {b: BoundAggregate() for b in bounds}
    rows: list[BoundReport] = []
    ordering_failures: list[str] = []
    coherence_failures: list[str] = []
    coh_checked, coh_max = 0, 0.0
    lo, hi = config.dims
    for trial in range(config.trials):
        ts = mix(config.master_seed, trial)
        rng = np.random.default_rng(ts)
        ens = config.ensembles[int(rng.integers(len(config.ensembles)))]
        n = int(rng.integers(lo, hi + 1))
        t = _TrialInputs(ts, ens, n)
        ref = f"trial={trial};seed={ts};ensemble={ens};n={n}"
        for b in bounds:
            prng = np.random.default_rng(mix(ts, _PARAM_STREAM, catalog_index[b]))
            params = draw_params(b, prng, phis, config.alphas, config.rs)
            if params is None:
                agg[b].skipped += 1
                agg[b].skip_reasons["no admissible parameters"] += 1
                continue
            try:
                rep = evaluate_bound(b, bound_inputs(b, t, config.family_size), params, config.slack_tol)
            except OradiusError as exc:
                agg[b].skipped += 1
                agg[b].skip_reasons[exc.code] += 1
                continue
            agg[b].add(rep, ref)
            rows.append(rep)
        ordering_failures.extend(_ordering_checks(t.get("A"), ref))
        if trial < config.coherence_trials:
            fam = {k: [t.get(k, None, j) for j in range(config.family_size)] for k in ("A", "B", "X")}
            r = config.rs[trial % len(config.rs)]
            alpha = config.alphas[trial % len(config.alphas)]
            for res in coherence_checks(t.get("A"), fam, t.get("P"), t.get("Q"), alpha=alpha, r=r):
                coh_checked += 1
                coh_max = max(coh_max, res.relative)
                if not res.ok:
                    coherence_failures.append(f"{res.name}: {res.rhs_bound!r} vs {res.rhs_reference!r} ({ref})")
    return CampaignReport(config, agg, rows, ordering_failures, coherence_failures, coh_checked, coh_max)


def ordering_values(a: np.ndarray) -> tuple[float, float, float]:
    """(rhs AOK, rhs BP at r=1, rhs KITT05U)."""
    return (
        evaluate_bound("AOK", {"A": a}).rhs,
        evaluate_bound("BP", {"A": a}, BoundParams(r=1.0)).rhs,
        evaluate_bound("KITT05U", {"A": a}).rhs,
    )


def _ordering_checks(a: np.ndarray, ref: str) -> list[str]:
    aok, bp, k05 = ordering_values(a)
    tol = ORDERING_RTOL * max(1.0, abs(aok), abs(bp), abs(k05))
    out = []
    if aok > k05 + tol:
        out.append(f"rhs(AOK)={aok!r} > rhs(KITT05U)={k05!r} ({ref})")
    if bp > k05 + tol:
        out.append(f"rhs(BP,r=1)={bp!r} > rhs(KITT05U)={k05!r} ({ref})")
    return out


# -- manifests ---------------------------------------------------------------------

_MANIFEST_KEYS = {"seed", "trials", "dims", "ensembles", "bounds", "phi", "alpha", "r", "coherence_trials", "family_size"}


def _split(v: str) -> list[str]:
    return [s.strip() for s in v.replace(";", ",").split(",") if s.strip()]


def parse_manifest(text: str, env: Optional[Mapping[str, str]] = None) -> CampaignConfig:
    """key=value lines; ``#`` starts a comment. ORADIUS_SEED in ``env`` overrides ``seed``."""
    vals: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ManifestError(f"line {lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in _MANIFEST_KEYS:
            raise ManifestError(f"line {lineno}: unknown key {k!r}")
        vals[k] = v
    env = os.environ if env is None else env
    if env.get("ORADIUS_SEED"):
        vals["seed"] = env["ORADIUS_SEED"]
    kw: dict = {}
    try:
        if "seed" in vals:
            kw["master_seed"] = int(vals["seed"], 0) & MASK64
        if "trials" in vals:
            kw["trials"] = int(vals["trials"])
        if "coherence_trials" in vals:
            kw["coherence_trials"] = int(vals["coherence_trials"])
        if "family_size" in vals:
            kw["family_size"] = int(vals["family_size"])
        if "dims" in vals:
            parts = vals["dims"].split("-")
            kw["dims"] = (int(parts[0]), int(parts[-1])) if len(parts) <= 2 else None
            if kw["dims"] is None:
                raise ValueError(vals["dims"])
        if "ensembles" in vals and vals["ensembles"] != "all":
            kw["ensembles"] = tuple(_split(vals["ensembles"]))
        elif "ensembles" in vals:
            kw["ensembles"] = ENSEMBLES
        if "bounds" in vals and vals["bounds"] != "all":
            kw["bound_ids"] = tuple(_split(vals["bounds"]))
        if "phi" in vals:
            kw["phis"] = tuple(_split(vals["phi"]))
        if "alpha" in vals:
            kw["alphas"] = tuple(float(s) for s in _split(vals["alpha"]))
        if "r" in vals:
            kw["rs"] = tuple(float(s) for s in _split(vals["r"]))
    except ValueError as exc:
        raise ManifestError(f"malformed manifest value: {exc}") from None
    cfg = CampaignConfig(**kw)
    cfg.validate()
    return cfg


def format_manifest(cfg: CampaignConfig) -> str:
    lines = [
        f"seed={cfg.master_seed}",
        f"trials={cfg.trials}",
        f"dims={cfg.dims[0]}-{cfg.dims[1]}",
        "ensembles=" + ",".join(cfg.ensembles),
        "bounds=" + (",".join(cfg.bound_ids) if cfg.bound_ids else "all"),
        "phi=" + ",".join(cfg.phis),
        "alpha=" + ",".join(fmt_param(a) for a in cfg.alphas),
        "r=" + ",".join(fmt_param(r) for r in cfg.rs),
        f"coherence_trials={cfg.coherence_trials}",
        f"family_size={cfg.family_size}",
    ]
    return "\n".join(lines) + "\n"


# -- witness search ----------------------------------------------------------------


@dataclass
class WitnessResult:
    matrices: dict
    report: BoundReport
    evaluations: int
    restarts: int

    @property
    def violation(self) -> bool:
        return self.report.verdict == "violated"


def _realize(bound_id: str, state: dict) -> dict:
    """Map unconstrained gaussian parameters to admissible inputs of unit scale."""
    desc = get_bound(bound_id)
    if desc.commuting:
        m = state["M"] / max(mc.operator_norm(state["M"]), 1e-300)
        c = state["c"]
        return {desc.inputs[0]: _poly3(m, c[0]), desc.inputs[1]: _poly3(m, c[1])}
    out = {}
    for role in desc.inputs:
        gs = state[role]
        mats = []
        for g in gs:
            nrm = max(np.linalg.norm(g), 1e-300)
            g = g / nrm
            if role in desc.psd_inputs:
                g = np.conj(g).T @ g
            elif role in desc.contraction_inputs:
                g = g / (mc.operator_norm(g) + 1e-6)
            mats.append(g)
        out[role] = mats if desc.family else mats[0]
    return out


def _initial_state(bound_id: str, n: int, rng: np.random.Generator, ensemble: str, family_size: int) -> dict:
    desc = get_bound(bound_id)
    seed = int(rng.integers(1 << 62))
    if desc.commuting:
        return {"M": _ginibre(n, rng), "c": (rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4)))}
    k = family_size if desc.family else 1
    state = {}
    for i, role in enumerate(desc.inputs):
        ens = ensemble if ensemble not in PAIR_ENSEMBLES and ensemble not in ("psd", "contraction") else "ginibre"
        state[role] = [np.asarray(gen_matrix(ens, n, mix(seed, i, j)), dtype=complex) for j in range(k)]
    return state


def _perturb(state: dict, sigma: float, rng: np.random.Generator) -> dict:
    out = {}
    for k, v in state.items():
        if isinstance(v, list):
            new = []
            for g in v:
                d = (rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)) * sigma
                new.append(g + d)
            out[k] = new
        else:
            out[k] = v + (rng.standard_normal(v.shape) + 1j * rng.standard_normal(v.shape)) * sigma
    return out


def witness_search(
    bound_id: str,
    params: BoundParams = BoundParams(),
    budget: int = 2000,
    seed: int = 0,
    n: int = 2,
    ensemble: str = "ginibre",
    family_size: int = 2,
    slack_tol: float = 1e-7,
) -> WitnessResult:
    """Random-restart hill climb minimizing slack / max(|lhs|, |rhs|).

    Each step perturbs every entry by a complex gaussian of size ``sigma``;
    an improving step is kept (and ``sigma`` grows by 1.5), and
    ``WITNESS_PATIENCE`` consecutive failing steps halve ``sigma``; below
    ``1e-12`` the climb restarts from a fresh draw. The search stops early
    at a violation or once equality is attained within the error budget.
    """
    get_bound(bound_id)
    if ensemble not in ENSEMBLES:
        raise UnknownEnsemble(f"unknown ensemble {ensemble!r}")
    rng = np.random.default_rng(mix(seed, 0x5EED))
    evals, restarts = 0, 0
    best = None  # (objective, matrices, report)

    def score(state):
        nonlocal evals
        mats = _realize(bound_id, state)
        evals += 1
        try:
            rep = evaluate_bound(bound_id, mats, params, slack_tol)
        except OradiusError:
            return math.inf, mats, None
        if rep.verdict == "overflow":
            return math.inf, mats, rep
        obj = rep.slack / max(abs(rep.lhs), abs(rep.rhs), 1e-300)
        return obj, mats, rep

    while evals < budget:
        state = _initial_state(bound_id, n, rng, ensemble, family_size)
        cur = score(state)
        restarts += 1
        sigma, fails = 0.3, 0
        while evals < budget and sigma > 1e-12:
            cand_state = _perturb(state, sigma, rng)
            cand = score(cand_state)
            if cand[0] < cur[0]:
                state, cur = cand_state, cand
                sigma, fails = sigma * 1.5, 0
            else:
                fails += 1
                if fails >= WITNESS_PATIENCE:
                    sigma, fails = sigma * 0.5, 0
            if cur[2] is not None and cur[2].verdict in ("violated", "tight"):
                break
        if cur[2] is not None and (best is None or cur[0] < best[0]):
            best = cur
        if best is not None and best[2].verdict in ("violated", "tight"):
            break
    if best is None:
        raise OradiusError(f"witness search for {bound_id} found no admissible input")
    return WitnessResult(best[1], best[2], evals, restarts)
