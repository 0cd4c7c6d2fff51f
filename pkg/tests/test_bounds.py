import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from oradius import bounds as bd
from oradius.bounds import BoundParams, Iv, evaluate_bound, make_report, parse_fg, tightness_rank
from oradius.errors import (
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
from oradius.harness import gen_matrix
from oradius.orlicz import parse_phi

NIL = np.array([[0, 1], [0, 0]], dtype=complex)
FLIP = np.array([[0, 1], [1, 0]], dtype=complex)
IDS = (
    "EQV KITT03 KITT05L KITT05U HK1 HK2 AOK BP HOLB4 HOLB2C FH POWK KITT-ATBCSD T31 T33i T33ii T34i T34ii "
    "T36i T36ii T38 T310 T310C T312i T312ii T314 T316 T317 T319 T321 T322 T323 T324 T41"
).split()


def P(**kw):
    if "phi" in kw and isinstance(kw["phi"], str):
        kw["phi"] = parse_phi(kw["phi"])
    if "psi" in kw and isinstance(kw["psi"], str):
        kw["psi"] = parse_phi(kw["psi"])
    return BoundParams(**kw)


def test_catalog_ids_exact():
    ids = [d.id for d in bd.list_bounds()]
    assert ids == IDS and len(ids) == 34
    assert all(len(d.inputs) >= 1 for d in bd.list_bounds())
    for bid in ("T31", "T33i"):
        assert {"phi", "psi"} <= set(bd.get_bound(bid).requires)


def test_unknown_bound():
    with pytest.raises(UnknownBound):
        evaluate_bound("T99", {"A": NIL})


# -- equality cases computed by hand ------------------------------------------


def test_kitt03_square_zero_tight():
    r = evaluate_bound("KITT03", {"A": NIL})
    assert (r.lhs, r.rhs, r.verdict) == (0.5, 0.5, "tight")


def test_kitt05l_square_zero_tight():
    r = evaluate_bound("KITT05L", {"A": NIL})
    assert r.lhs == pytest.approx(0.25) and r.rhs == pytest.approx(0.25) and r.verdict == "tight"


def test_aok_involution_tight():
    r = evaluate_bound("AOK", {"A": FLIP})
    assert r.lhs == pytest.approx(1.0, abs=1e-12) and r.rhs == pytest.approx(1.0, abs=1e-12)
    assert r.verdict == "tight"


def test_t31_pnorm2_square_zero():
    r = evaluate_bound("T31", {"A": NIL}, P(phi="pnorm:2", psi="pnorm:2"))
    assert r.lhs == pytest.approx(0.25) and r.rhs == pytest.approx(0.5) and r.verdict == "holds"


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.9, 1.0])
def test_t319_square_zero_tight_for_all_alpha(alpha):
    r = evaluate_bound("T319", {"A": NIL}, P(phi="power:1", alpha=alpha))
    assert abs(r.slack) <= 1e-12 and r.verdict == "tight"


def test_t317_all_identity_linear_tight():
    eye = np.eye(2)
    r = evaluate_bound("T317", {k: eye for k in "ABCDST"}, P(phi="power:1", fg=parse_fg("sqrt")))
    assert r.lhs == pytest.approx(2.0) and r.rhs == pytest.approx(2.0) and r.verdict == "tight"


def test_t317_quadratic_phi_counterexample():
    # phi(w(2I)) = 4 while 1/2 ||4 phi(I)|| = 2: the T317 statement fails for phi = t^2
    eye = np.eye(2)
    r = evaluate_bound("T317", {k: eye for k in "ABCDST"}, P(phi="power:2", fg=parse_fg("sqrt")))
    assert r.lhs == pytest.approx(4.0) and r.rhs == pytest.approx(2.0) and r.verdict == "violated"


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_t41_scalar_involution_tight(alpha):
    r = evaluate_bound("T41", {"P": [[1.0]], "Q": [[1.0]]}, P(phi="power:1", alpha=alpha))
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0) and r.verdict == "tight"


def test_t38_involution_power1_tight():
    r = evaluate_bound("T38", {"A": FLIP}, P(phi="power:1"))
    assert abs(r.slack) <= 1e-9


def test_t33ii_identities_tight():
    eye = np.eye(3)
    r = evaluate_bound("T33ii", {"A": eye, "B": eye, "X": eye}, P(phi="pnorm:2", alpha=0.3))
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0) and r.verdict == "tight"


def test_kitt03_jordan_two_by_two_value():
    # ||A|| = golden ratio, ||A^2|| = 1 + sqrt(2), w = 3/2
    a = np.array([[1, 1], [0, 1]])
    r = evaluate_bound("KITT03", {"A": a})
    assert r.lhs == pytest.approx(1.5, abs=1e-9)
    assert r.rhs == pytest.approx(0.5 * ((1 + math.sqrt(5)) / 2 + math.sqrt(1 + math.sqrt(2))), rel=1e-14)


def test_eqv_reports_tighter_side():
    r = evaluate_bound("EQV", {"A": NIL})
    assert r.lhs == pytest.approx(0.5) and r.rhs == pytest.approx(0.5)
    r = evaluate_bound("EQV", {"A": np.diag([1.0, 2.0])})
    assert r.lhs == pytest.approx(2.0) and r.rhs == pytest.approx(2.0)


def test_t38_power2_random_holds():
    a = gen_matrix("ginibre", 4, 123)
    r = evaluate_bound("T38", {"A": a}, P(phi="power:2"))
    assert r.slack >= -r.error_budget


def test_overflow_verdict():
    r = evaluate_bound("T36ii", {"A": 30 * np.eye(2)}, P(phi="exppow:2"))
    assert r.verdict == "overflow"


# -- preconditions ---------------------------------------------------------------


def test_missing_input_and_phi():
    with pytest.raises(MissingInput):
        evaluate_bound("HOLB4", {"A": NIL})
    with pytest.raises(MissingInput):
        evaluate_bound("T34i", {"A": NIL})


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        evaluate_bound("HOLB4", {"A": NIL, "B": np.eye(3)})


@pytest.mark.parametrize(
    "bid,params",
    [
        ("T33i", dict(phi="pnorm:2", r=1.5)),
        ("T312i", dict(phi="power:1", alpha=0.6)),
        ("T312i", dict(phi="power:1", alpha=0.0)),
        ("HK1", dict(r=0.5)),
        ("POWK", dict(r=2.5)),
        ("T34ii", dict(phi="power:1", alpha=1.5)),
    ],
)
def test_param_out_of_range(bid, params):
    desc = bd.get_bound(bid)
    inputs = {role: (np.eye(2) if role in desc.psd_inputs else NIL) for role in desc.inputs}
    with pytest.raises(ParamOutOfRange):
        evaluate_bound(bid, inputs, P(**params))


def test_not_psd():
    with pytest.raises(NotPSD):
        evaluate_bound("T312i", {"A": NIL, "B": np.eye(2), "X": NIL}, P(phi="power:1", alpha=0.3))


def test_not_contraction():
    with pytest.raises(NotContraction):
        evaluate_bound("T310C", {"A": NIL, "B": NIL, "X": 2 * np.eye(2)}, P(phi="power:1"))


def test_not_submultiplicative():
    with pytest.raises(NotSubmultiplicative):
        evaluate_bound("T321", {"A": NIL}, P(phi="pnorm:2"))


def test_not_commuting():
    with pytest.raises(NotCommuting):
        evaluate_bound("HOLB2C", {"A": NIL, "B": NIL.T})


def test_bad_factor_pair():
    with pytest.raises(ParamOutOfRange):
        parse_fg("pow:2")
    bad = bd.FactorPair("bad", lambda t: t, lambda t: t)
    with pytest.raises(ParamOutOfRange):
        evaluate_bound("T317", {k: np.eye(2) for k in "ABCDST"}, P(phi="power:1", fg=bad))


# -- ranking ---------------------------------------------------------------------


def test_tightness_rank_square_zero():
    ranked = tightness_rank(NIL, ["KITT05U", "AOK"])
    assert [b for b, _ in ranked] == ["AOK", "KITT05U"]
    assert ranked[0][1] == pytest.approx(0.25) and ranked[1][1] == pytest.approx(0.5)


def test_tightness_rank_ties_alphabetical():
    ranked = tightness_rank(FLIP, ["KITT05U", "BP", "AOK"], P(r=1.0))
    assert [b for b, _ in ranked] == ["AOK", "BP", "KITT05U"]
    assert all(v == pytest.approx(1.0) for _, v in ranked)


def test_tightness_rank_incomparable():
    with pytest.raises(IncomparableBounds):
        tightness_rank(NIL, ["KITT03", "AOK"])
    with pytest.raises(IncomparableBounds):
        tightness_rank(NIL, ["T38", "AOK"], P(phi="pnorm:2"))
    # T38 with phi = t bounds w^2 like AOK
    tightness_rank(NIL, ["T38", "AOK"], P(phi="power:1"))


def test_aok_refines_kitt05u_on_random_draws():
    rng = np.random.default_rng(8)
    for _ in range(30):
        a = gen_matrix("ginibre", int(rng.integers(2, 7)), int(rng.integers(1 << 30)))
        aok = evaluate_bound("AOK", {"A": a}).rhs
        k05 = evaluate_bound("KITT05U", {"A": a}).rhs
        assert aok <= k05 + 1e-9 * max(1.0, k05)


# -- reports and intervals ---------------------------------------------------------


@seed(3)
@settings(max_examples=200, deadline=None)
@given(
    l0=st.floats(-1e6, 1e6),
    lw=st.floats(0, 1),
    r0=st.floats(-1e6, 1e6),
    rw=st.floats(0, 1),
)
def test_verdict_invariants(l0, lw, r0, rw):
    rep = make_report("X", BoundParams(), Iv(l0, l0 + lw), Iv(r0, r0 + rw))
    assert rep.slack == rep.rhs - rep.lhs
    assert rep.error_budget >= 0
    assert (rep.verdict == "violated") == (rep.slack < -rep.error_budget)
    assert (rep.verdict == "tight") == (abs(rep.slack) <= rep.error_budget)


def test_non_finite_report_is_overflow():
    assert make_report("X", BoundParams(), Iv(1.0, math.inf), Iv(1.0, 2.0)).verdict == "overflow"


def test_interval_phi_image_uses_endpoints():
    phi = parse_phi("pnorm:2")
    iv = Iv(1.0, 2.0).map(phi)
    assert (iv.lo, iv.hi) == (0.5, 2.0)


# -- invariants ------------------------------------------------------------------------


@seed(4)
@settings(max_examples=15, deadline=None)
@given(s=st.integers(0, 2**62), n=st.integers(2, 6), r=st.sampled_from([1.0, 2.0, 3.0]), alpha=st.sampled_from([0.25, 0.5, 0.75]))
def test_specialization_coherence(s, n, r, alpha):
    fam = {k: [gen_matrix("ginibre", n, s + 10 * i + j) for j in range(2)] for i, k in enumerate("ABX")}
    results = bd.coherence_checks(
        gen_matrix("ginibre", n, s), fam, gen_matrix("ginibre", n, s + 1), gen_matrix("ginibre", n, s + 2), alpha=alpha, r=r
    )
    assert len(results) == 6
    for res in results:
        assert res.ok, (res.name, res.rhs_bound, res.rhs_reference)


@seed(5)
@settings(max_examples=20, deadline=None)
@given(s=st.integers(0, 2**62), c=st.floats(0.1, 5.0), r=st.sampled_from([1.0, 2.0, 3.0]))
def test_power_phi_scaling(s, c, r):
    a = gen_matrix("ginibre", 3, s)
    p = P(phi=f"power:{int(r)}")
    base = evaluate_bound("T34i", {"A": a}, p)
    scaled = evaluate_bound("T34i", {"A": c * a}, p)
    scale = max(1.0, abs(scaled.lhs), abs(scaled.rhs))
    assert abs(scaled.lhs - c**r * base.lhs) <= 1e-9 * scale
    assert abs(scaled.rhs - c**r * base.rhs) <= 1e-9 * scale


def test_t34ii_rhs_finite_across_alpha():
    a = gen_matrix("ginibre", 4, 77)
    for alpha in np.linspace(0, 1, 21):
        r = evaluate_bound("T34ii", {"A": a}, P(phi="logtemp:2", alpha=float(alpha)))
        assert math.isfinite(r.rhs) and not math.isnan(r.rhs)


def _inputs_for(bid, rng, n):
    desc = bd.get_bound(bid)
    if desc.commuting:
        a, b = gen_matrix("commuting-pair", n, int(rng.integers(1 << 30)))
        return {"A": a, "B": b}
    out = {}
    for role in desc.inputs:
        ens = "psd" if role in desc.psd_inputs else "contraction" if role in desc.contraction_inputs else "ginibre"
        mats = [gen_matrix(ens, n, int(rng.integers(1 << 30))) for _ in range(2 if desc.family else 1)]
        out[role] = mats if desc.family else mats[0]
    return out


@pytest.mark.parametrize("bid", IDS)
def test_soundness_small_random(bid):
    desc = bd.get_bound(bid)
    rng = np.random.default_rng(abs(hash(bid)) % (1 << 32))
    phis = ["power:1", "power:2", "pnorm:2", "pnorm:3", "logtemp:2"]
    if "psi" in desc.uses:
        phis = ["pnorm:2", "pnorm:3", "power:2", "logtemp:2"]
    if desc.submultiplicative:
        phis = ["power:1", "power:2"]
    if bid == "T317":
        # T317 only holds for phi = t (see the counterexample test)
        phis = ["power:1"]
    for i in range(12):
        lo, hi = desc.alpha_range
        alpha = float(rng.uniform(max(lo, 1e-3), hi))
        r = float(max(desc.r_min, 1 + int(rng.integers(0, 3))))
        params = P(phi=phis[i % len(phis)], alpha=alpha, r=r)
        rep = evaluate_bound(bid, _inputs_for(bid, rng, int(rng.integers(2, 5))), params)
        assert rep.verdict != "violated", rep
