import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from oradius import orlicz as oz
from oradius.errors import MaximizerUnbounded, NegativeArgument, NotConvex, DomainError, SpecifierError
from oracles import brute_force_conjugate

CATALOG = ["power:1", "power:2", "power:3", "pnorm:1.5", "pnorm:2", "pnorm:3", "exppow:2", "logtemp:2"]


@pytest.mark.parametrize("spec", CATALOG)
def test_catalog_functions_pass_invariant_probe(spec):
    oz.probe_invariants(oz.parse_phi(spec))


@pytest.mark.parametrize("spec", ["power:0.5", "pnorm:1", "exppow:1", "logtemp:1.5", "cube:2", "power:-2", "power:2e3", "power:"])
def test_parse_phi_rejects(spec):
    with pytest.raises(SpecifierError):
        oz.parse_phi(spec)


def test_parse_phi_canonical_id():
    assert oz.parse_phi("pnorm:2.0").id == "pnorm:2"
    assert oz.parse_phi("power:1.5").id == "power:1.5"


def test_evaluate_values():
    assert oz.evaluate(oz.parse_phi("pnorm:2"), 3.0) == 4.5
    assert oz.evaluate(oz.parse_phi("exppow:2"), 1.0) == pytest.approx(math.e - 1)
    assert oz.evaluate(oz.parse_phi("logtemp:2"), 1.0) == pytest.approx(1 / math.log(math.e + 1))
    with pytest.raises(NegativeArgument):
        oz.evaluate(oz.parse_phi("power:2"), -1.0)


def test_overflow_sentinel_is_inf():
    assert oz.evaluate(oz.parse_phi("exppow:2"), 100.0) == math.inf


def test_probe_rejects_nonconvex_and_degenerate():
    concave = oz.OrliczFunction("sqrt", np.sqrt)
    with pytest.raises(NotConvex):
        oz.probe_invariants(concave)
    degenerate = oz.OrliczFunction("hinge", lambda t: np.maximum(np.asarray(t, float) - 1.0, 0.0))
    with pytest.raises(DomainError):
        oz.probe_invariants(degenerate)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_numeric_conjugate_matches_closed_form(p):
    phi = oz.power_normalized(p)
    q = p / (p - 1)
    num = oz.numeric_complement(phi)
    for v in np.linspace(0.1, 10.0, 40):
        assert num(v) == pytest.approx(v**q / q, rel=1e-8)


@pytest.mark.parametrize("spec,v", [("exppow:2", 3.0), ("logtemp:2", 2.5), ("power:2", 1.7)])
def test_numeric_conjugate_against_brute_force(spec, v):
    phi = oz.parse_phi(spec)
    exact = oz.conjugate_value(phi, v)
    approx = brute_force_conjugate(phi, v, umax=5.0)
    # the dense grid is a lower estimate within O(h^2)
    assert approx <= exact + 1e-12
    assert exact - approx < 1e-9


def test_power_one_complement_unbounded_beyond_one():
    phi = oz.parse_phi("power:1")
    with pytest.raises(MaximizerUnbounded):
        oz.conjugate_value(phi, 2.0)
    assert oz.conjugate_value(phi, 0.5) == 0.0
    assert oz.conjugate_value(phi, 1.0) == 0.0


def test_pnorm_complement_is_closed_form():
    assert oz.complement(oz.parse_phi("pnorm:3")).id == "pnorm:1.5"
    assert oz.complement(oz.parse_phi("exppow:2")).id == "conj(exppow:2)"


def test_young_gap_trivial_equality():
    assert oz.young_gap(oz.power_normalized(2), 1.0, 1.0) == 0.0


@pytest.mark.parametrize("spec", ["power:2", "pnorm:1.5", "pnorm:2", "pnorm:3", "exppow:2", "logtemp:2", "power:1"])
def test_young_equality_at_kernel(spec):
    phi = oz.parse_phi(spec)
    for u in np.linspace(0.05, 3.0, 100):
        v = float(phi.kernel(u))
        gap = oz.young_gap(phi, u, v)
        assert abs(gap) <= 1e-8 * max(1.0, u * v)


@seed(5)
@settings(max_examples=80, deadline=None)
@given(
    spec=st.sampled_from(["power:2", "pnorm:2", "pnorm:3", "exppow:2", "logtemp:2"]),
    u=st.floats(0, 4),
    v=st.floats(0, 4),
)
def test_young_inequality(spec, u, v):
    phi = oz.parse_phi(spec)
    assert oz.young_gap(phi, u, v) >= -1e-9 * max(1.0, u * v)


@seed(6)
@settings(max_examples=60, deadline=None)
@given(
    spec=st.sampled_from(CATALOG),
    a=st.lists(st.floats(0, 5), min_size=1, max_size=8),
    alpha=st.floats(0, 1),
    u=st.floats(0, 5),
)
def test_bohr_and_scaling(spec, a, alpha, u):
    phi = oz.parse_phi(spec)
    assert oz.bohr_check(phi, a)
    assert oz.scaling_check(phi, alpha, u)


def test_double_conjugate_returns_phi():
    phi = oz.parse_phi("logtemp:2")
    psi = oz.numeric_complement(phi)
    for u in (0.3, 1.0, 2.0):
        assert oz.conjugate_value(psi, u) == pytest.approx(oz.evaluate(phi, u), rel=1e-7)


def test_submultiplicative_probe():
    assert oz.submultiplicative_probe(oz.parse_phi("power:2"))
    assert oz.submultiplicative_probe(oz.parse_phi("power:1"))
    assert not oz.submultiplicative_probe(oz.parse_phi("pnorm:2"))
    assert not oz.submultiplicative_probe(oz.parse_phi("exppow:2"))
    assert not oz.submultiplicative_probe(oz.parse_phi("logtemp:2"))
