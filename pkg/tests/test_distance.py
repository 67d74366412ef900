import csv
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonclass.distance import (
    ANALYTIC_CAT_SMALL,
    ANALYTIC_NUMBER,
    ANALYTIC_SQUEEZED,
    ANALYTIC_VAC_ONE,
    NUMERIC,
    bu_distance_pure,
    d_m_cat_asymptotic,
    d_m_closed_forms,
    d_m_number,
    d_m_vac_one,
    default_seeds,
    gaussian_bijection,
    gaussian_bijection_inverse,
    hs_distance_mixed,
    hs_distance_pure,
    max_q,
    nonclassicality_distance,
    overlap,
)
from nonclass.errors import DomainError, UnsupportedStateError
from nonclass.phase_space import q_function
from nonclass.states import (
    FockDensity,
    coherent,
    even_cat,
    fock,
    make_cat,
    make_vac_fock_mixture,
    make_vac_fock_superposition,
    mix,
    number_state,
    odd_cat,
    squeezed,
    to_fock_density,
)


def test_coherent_is_zero():
    rep = nonclassicality_distance(coherent(0.4 - 1.2j))
    assert rep.d_m == 0.0
    assert rep.beta_star == 0.4 - 1.2j
    beta, q, _ = max_q(coherent(0.4 - 1.2j))
    assert abs(beta - (0.4 - 1.2j)) < 1e-6
    assert abs(q - 1 / math.pi) < 1e-12


def test_squeezed_max_q():
    s = squeezed(1.0 + 0.5j, 0.8, 0.3)
    beta, q, _ = max_q(s)
    assert abs(beta - s.alpha) < 1e-6
    assert abs(q - 1.0 / (math.pi * math.cosh(0.8))) < 1e-12


def test_one_photon():
    assert abs(nonclassicality_distance(number_state(1)).d_m - 0.632121) < 1e-6


def test_max_q_never_below_seeds():
    spec = make_cat(1.4, 0.3, 0.9)
    seeds = [0.3 + 0.1j, -2.0]
    beta, q, trace = max_q(spec, seeds)
    for s in default_seeds(spec) + seeds:
        assert q >= q_function(spec, s)
    assert len(trace) == len(default_seeds(spec)) + 2


def test_cat_seeds_include_both_amplitudes():
    seeds = default_seeds(even_cat(2.0))
    assert 2.0 in seeds and -2.0 in seeds


@pytest.mark.parametrize("spec,method", [
    (number_state(4), ANALYTIC_NUMBER),
    (make_vac_fock_superposition(0.3, 1.1, 1), ANALYTIC_VAC_ONE),
    (squeezed(0.2, 0.7, 1.0), ANALYTIC_SQUEEZED),
    (even_cat(0.7), ANALYTIC_CAT_SMALL),
    (even_cat(1.5), NUMERIC),
    (make_vac_fock_superposition(0.3, 0.0, 2), NUMERIC),
])
def test_auto_method_and_numeric_agree(spec, method):
    auto = nonclassicality_distance(spec)
    num = nonclassicality_distance(spec, method="numeric")
    assert auto.method == method
    assert abs(auto.d_m - num.d_m) < 1e-8
    assert abs(auto.d_m - (1 - math.pi * auto.q_max)) < 1e-12
    assert 0.0 <= auto.d_m < 1.0


def test_vac_one_argmax_direction():
    spec = make_vac_fock_superposition(0.4, 2.0, 1)
    auto = nonclassicality_distance(spec)
    num = nonclassicality_distance(spec, method="numeric")
    assert abs(auto.beta_star - num.beta_star) < 1e-6


def test_mixed_state_rejected():
    with pytest.raises(UnsupportedStateError):
        nonclassicality_distance(make_vac_fock_mixture(0.5, 1))


def test_pure_mixture_is_accepted():
    spec = mix([(0.5, number_state(1)), (0.5, number_state(1))])
    assert abs(nonclassicality_distance(spec).d_m - d_m_number(1)) < 1e-12


def test_closed_form_examples():
    assert abs(d_m_closed_forms("squeezed", r=1.0) - 0.35194) < 1e-5
    want = 1 - math.exp(-(1.5 - math.sqrt(1.25))) * (1 + 0.5 * math.sqrt(1.25) - 0.25)
    assert abs(d_m_closed_forms("vac_one", xi=0.5) - want) < 1e-15
    assert abs(d_m_closed_forms("cat_even_asymptotic", alpha=3.0) - 0.5) < 1e-7
    assert abs(d_m_closed_forms("cat_even_small", alpha=0.8) - (1 - 1 / math.cosh(0.64))) < 1e-15
    assert d_m_vac_one(0.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)
    assert d_m_vac_one(1.0) == 0.0


@pytest.mark.parametrize("family,params", [
    ("cat_even_small", {"alpha": 1.5}),
    ("cat_even_asymptotic", {"alpha": 0.5}),
    ("vac_one", {"xi": 1.2}),
    ("number", {"n": -1}),
    ("squeezed", {"r": -0.1}),
    ("teleport", {"x": 1}),
    ("squeezed", {"alpha": 1}),
])
def test_closed_form_domain_errors(family, params):
    with pytest.raises(DomainError):
        d_m_closed_forms(family, **params)


def test_cat_small_error_names_constraint():
    with pytest.raises(DomainError, match="alpha <= 1"):
        d_m_closed_forms("cat_even_small", alpha=1.2)


def test_bijection_examples():
    assert gaussian_bijection(0.0) == 0.0
    assert gaussian_bijection(0.4999) > 0.97
    for r in (0.5, 1.0, 2.0):
        t = math.tanh(r) / (1 + math.tanh(r))
        assert abs(gaussian_bijection(t) - (1 - 1 / math.cosh(r))) < 1e-12
    with pytest.raises(DomainError):
        gaussian_bijection(0.5)


@given(st.floats(0.0, 0.4999))
def test_bijection_inverse(t):
    assert abs(gaussian_bijection_inverse(gaussian_bijection(t)) - t) < 1e-9


@given(st.floats(0.0, 0.49), st.floats(1e-4, 0.009))
def test_bijection_increasing(t, dt):
    assert gaussian_bijection(t + dt) > gaussian_bijection(t)


def test_number_state_degree_increases_to_one():
    vals = [d_m_number(n) for n in range(31)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[30] < 1.0 and vals[30] > 0.9


def test_vac_one_curve_decreasing():
    vals = [d_m_vac_one(x) for x in np.linspace(0, 1, 101)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_cat_degrees_approach_half():
    alphas = [0.2, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    even = [nonclassicality_distance(even_cat(a), method="numeric").d_m for a in alphas]
    odd = [nonclassicality_distance(odd_cat(a), method="numeric").d_m for a in alphas]
    assert all(b > a for a, b in zip(even, even[1:])) and even[-1] < 0.5
    assert all(b < a for a, b in zip(odd, odd[1:])) and odd[0] < 1 - math.exp(-1)
    assert abs(odd[-1] - 0.5) < 1e-3
    assert abs(even[-1] - d_m_cat_asymptotic(3.0)) < 1e-4


def test_distance_examples():
    assert hs_distance_pure(number_state(2), number_state(2)) == 0.0
    assert abs(hs_distance_pure(number_state(0), number_state(1)) - math.sqrt(2)) < 1e-15
    assert abs(hs_distance_pure(coherent(0), coherent(1)) - math.sqrt(2 - 2 / math.e)) < 1e-15
    assert bu_distance_pure(even_cat(1.0), even_cat(1.0)) < 1e-7
    assert abs(bu_distance_pure(number_state(0), number_state(3)) - math.sqrt(2)) < 1e-15
    assert abs(bu_distance_pure(number_state(0), coherent(1)) - math.sqrt(2 - 2 * math.exp(-0.5))) < 1e-15
    with pytest.raises(UnsupportedStateError):
        bu_distance_pure(make_vac_fock_mixture(0.5, 1), number_state(0))


def test_mixed_hs_examples():
    a = FockDensity(np.diag([0.5, 0.5]).astype(complex))
    b = FockDensity(np.diag([1.0, 0.0]).astype(complex))
    assert abs(hs_distance_mixed(a, b) - 1 / math.sqrt(2)) < 1e-15
    assert hs_distance_mixed(a, a) == 0.0
    m = make_vac_fock_mixture(0.5, 1)
    assert abs(hs_distance_pure(m, number_state(0)) - 1 / math.sqrt(2)) < 1e-15


PURE = st.one_of(
    st.builds(lambda a, b: fock([a, b, 0.5]), st.floats(-1, 1), st.floats(-1, 1)),
    st.builds(lambda a, x, p: make_cat(a, x, p), st.floats(0.2, 2.0), st.floats(0, 1), st.floats(0, 6)),
    st.builds(lambda a, r, t: squeezed(a, r, t), st.complex_numbers(max_magnitude=1.5),
              st.floats(0, 1.0), st.floats(0, 6)),
)


@given(PURE, PURE)
def test_hs_identity_and_density_agreement(a, b):
    ov = overlap(a, b)
    assert abs(hs_distance_pure(a, b) ** 2 + 2 * abs(ov) ** 2 - 2.0) < 1e-12
    # a common dimension keeps the truncation error at the tail mass, not its square root
    dim = max(to_fock_density(a).dim, to_fock_density(b).dim)
    dense = hs_distance_mixed(to_fock_density(a, min_dim=dim), to_fock_density(b, min_dim=dim))
    assert abs(dense ** 2 - hs_distance_pure(a, b) ** 2) < 1e-10


@given(PURE, PURE)
def test_overlap_matches_fock_vectors(a, b):
    dim = max(to_fock_density(a).dim, to_fock_density(b).dim)
    ra, rb = to_fock_density(a, min_dim=dim), to_fock_density(b, min_dim=dim)
    fid = float(np.real(np.trace(ra.rho @ rb.rho)))
    assert abs(abs(overlap(a, b)) ** 2 - fid) < 1e-10
    assert abs(overlap(a, b) - np.conj(overlap(b, a))) < 1e-12


def test_report_serialisation(tmp_path):
    rep = nonclassicality_distance(make_vac_fock_superposition(0.3, 0.0, 2))
    d = rep.to_dict()
    assert set(d) == {"d_m", "beta_star", "q_max", "seeds_tried", "method"}
    path = tmp_path / "ascent.csv"
    rep.write_trace_csv(path)
    rows = list(csv.reader(path.open(encoding="utf-8")))
    assert rows[0] == ["seed_x", "seed_y", "beta_x", "beta_y", "q"]
    assert len(rows) == rep.seeds_tried + 1
