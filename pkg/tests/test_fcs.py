import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from xychain import fcs, oracle
from xychain.fcs import (CharacteristicSamples, Distribution, char_fn_exact, char_fn_limit, char_fn_ppa,
                         coarse_grained_ppa, cumulants, distribution, invert, kink_observable,
                         magnetization_observable, sigma_entries, theta_grid)
from xychain.model import ChainParams, Thermal, bogoliubov_angle

OBS = {"kinks": kink_observable, "magnetization": magnetization_observable}


def tf(L, g, gamma=1.0):
    return ChainParams(L, g, gamma)


# --- sigma entries ---------------------------------------------------------

@given(st.floats(0.05, 3.09), st.floats(0, 3), st.floats(0, 1), st.floats(-4, 4))
def test_sigma_trace_invariant(k, g, gamma, theta):
    p = tf(4, g, gamma)
    for make in OBS.values():
        obs = make(p)
        s11, s22 = sigma_entries(obs, k, p, theta)
        lam = np.linalg.eigvalsh(obs.block_w1(np.array([k]))[0])
        assert s11 + s22 == pytest.approx(np.exp(1j * theta * lam).sum(), abs=1e-12)


def test_sigma_closed_forms():
    p = tf(8, 0.6)
    k, theta = 1.1, 0.37
    vt = bogoliubov_angle(k, p)
    assert sigma_entries(kink_observable(p), k, p, 0.0) == pytest.approx((1, 1))
    s11, _ = sigma_entries(kink_observable(p), k, p, theta)
    assert s11 == pytest.approx(math.cos(theta) + 1j * math.sin(theta) * math.cos(k - vt), abs=1e-14)
    s11, s22 = sigma_entries(magnetization_observable(p), k, p, theta)
    assert s11 == pytest.approx(math.cos(2 * theta) + 1j * math.cos(vt) * math.sin(2 * theta), abs=1e-14)
    assert s22 == pytest.approx(math.cos(2 * theta) - 1j * math.cos(vt) * math.sin(2 * theta), abs=1e-14)


# --- characteristic functions ------------------------------------------------

@pytest.mark.parametrize("name", list(OBS))
def test_char_fn_normalized(name):
    p = tf(10, 0.7, 0.5)
    obs = OBS[name](p)
    for beta in (0.0, 0.5, 8.0):
        assert char_fn_exact(obs, p, Thermal(beta), 0.0) == pytest.approx(1.0, abs=1e-13)
        assert char_fn_ppa(obs, p, Thermal(beta), 0.0) == pytest.approx(1.0, abs=1e-13)


def test_kinks_frozen_at_zero_field():
    p = tf(8, 0.0)
    th = np.linspace(-3, 3, 11)
    assert np.allclose(char_fn_exact(kink_observable(p), p, Thermal(50.0), th), 1.0, atol=1e-12)


@pytest.mark.parametrize("L,g,gamma", [(4, 0.3, 1.0), (6, 1.4, 0.5), (8, 0.9, 0.0), (10, 1.0, 1.0)])
@pytest.mark.parametrize("name", list(OBS))
def test_char_fn_against_oracle(L, g, gamma, name, rng):
    p = tf(L, g, gamma)
    H = oracle.build_hamiltonian(p)
    W = (oracle.build_kink_operator if name == "kinks" else oracle.build_magnetization_operator)(L)
    thetas = rng.uniform(-math.pi, math.pi, 32)
    for beta in (0.2, 2.5):
        ana = char_fn_exact(OBS[name](p), p, Thermal(beta), thetas)
        assert np.abs(ana - oracle.characteristic_function(W, H, beta, thetas)).max() <= 1e-8


@pytest.mark.parametrize("name", list(OBS))
def test_hermitian_symmetry_and_bound(name):
    p = tf(12, 0.8)
    obs = OBS[name](p)
    th = theta_grid(obs)
    for beta in (0.3, 3.0):
        v = char_fn_exact(obs, p, Thermal(beta), th)
        w = char_fn_exact(obs, p, Thermal(beta), -th)
        assert np.abs(w - np.conj(v)).max() <= 1e-12
        assert np.abs(v).max() <= 1 + 1e-10


def test_ppa_coincides_with_exact_at_infinite_temperature():
    p = tf(12, 0.4)
    mobs, kobs = magnetization_observable(p), kink_observable(p)
    a = distribution(mobs, p, "ppa", Thermal(0.0))
    b = distribution(mobs, p, "exact", Thermal(0.0))
    assert np.abs(a.probs - b.probs).max() <= 1e-12
    # for kinks the two differ only by sin^L(theta/2) = O(theta^L):
    # identical cumulants below order L, different histograms
    a = distribution(kobs, p, "ppa", Thermal(0.0))
    b = distribution(kobs, p, "exact", Thermal(0.0))
    assert cumulants(a, 6).kappa == pytest.approx(cumulants(b, 6).kappa, abs=1e-10)
    assert a.probs[1::2].max() > 0.1


def test_ppa_accurate_in_cold_paramagnet():
    p = tf(50, 2.0)
    obs = kink_observable(p)
    a = distribution(obs, p, "ppa", Thermal(5.0))
    b = distribution(obs, p, "exact", Thermal(5.0))
    assert np.abs(a.probs - b.probs).max() <= 1e-3


# --- limits ------------------------------------------------------------------

@pytest.mark.parametrize("L", [4, 8, 50])
def test_infinite_temperature_limits(L):
    p = tf(L, 1.3)
    d = distribution(kink_observable(p), p, "infinite_temperature")
    assert np.abs(d.probs - fcs.binomial_kinks_infinite_temperature(L).probs).max() <= 1e-12
    d = distribution(magnetization_observable(p), p, "infinite_temperature")
    assert np.abs(d.probs - fcs.binomial_magnetization_infinite_temperature(L).probs).max() <= 1e-12


def test_infinite_temperature_limit_matches_beta_zero():
    p = tf(10, 0.6)
    for obs in (kink_observable(p), magnetization_observable(p)):
        th = np.linspace(0, 6, 9)
        assert np.allclose(char_fn_limit(obs, p, "infinite_temperature", th),
                           char_fn_exact(obs, p, Thermal(0.0), th), atol=1e-12)


def test_ground_state_kinks_zero_field():
    p = tf(10, 0.0)
    d = distribution(kink_observable(p), p, "ground_state")
    assert d.probability(0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("g", [0.3, 1.0, 1.8])
def test_ground_state_limits_against_oracle(g):
    L = 8
    p = tf(L, g)
    H = oracle.build_hamiltonian(p)
    for name, W in (("kinks", oracle.build_kink_operator(L)),
                    ("magnetization", oracle.build_magnetization_operator(L))):
        obs = OBS[name](p)
        ref = oracle.ground_state_fcs(W, H, sector=1).on_support(obs.support)
        assert np.abs(distribution(obs, p, "ground_state").probs - ref).max() <= 1e-10


def test_limit_rejects_unknown():
    p = tf(4, 1.0)
    with pytest.raises(ValueError):
        char_fn_limit(kink_observable(p), p, "warm", 0.1)


# --- inversion ---------------------------------------------------------------

def test_invert_rejects_wrong_grid():
    obs = kink_observable(tf(6, 1.0))
    with pytest.raises(ValueError):
        invert(obs, CharacteristicSamples(np.linspace(0, 1, 7), np.ones(7)))


def test_invert_delta_and_binomial():
    p = tf(6, 1.0)
    obs = kink_observable(p)
    th = theta_grid(obs)
    d = invert(obs, CharacteristicSamples(th, np.ones_like(th, dtype=complex)))
    assert d.probability(0) == pytest.approx(1.0) and d.total == pytest.approx(1.0)
    mobs = magnetization_observable(p)
    th = theta_grid(mobs)
    d = invert(mobs, CharacteristicSamples(th, np.cos(th) ** 6 + 0j))
    assert np.allclose(d.probs, binom.pmf((d.support + 6) // 2, 6, 0.5), atol=1e-14)


def test_invert_rejects_inconsistent_samples():
    obs = kink_observable(tf(4, 1.0))
    th = theta_grid(obs)
    with pytest.raises(ValueError, match="imaginary"):
        invert(obs, CharacteristicSamples(th, np.exp(0.5j * th)))
    with pytest.raises(ValueError, match="negative"):
        invert(obs, CharacteristicSamples(th, 1.2 - 0.2 * np.exp(1j * th)))


# --- distributions -------------------------------------------------------------

@pytest.mark.parametrize("name,variant", [("kinks", "exact"), ("kinks", "ppa"), ("kinks", "coarse_grained_ppa"),
                                          ("magnetization", "exact"), ("magnetization", "ppa")])
def test_normalization(name, variant):
    p = tf(20, 0.9, 0.7)
    d = distribution(OBS[name](p), p, variant, Thermal(1.5))
    assert abs(d.total - 1) <= 1e-10 and d.probs.min() >= 0


def test_coarse_graining_needs_unit_lattice():
    p = tf(8, 0.9)
    with pytest.raises(ValueError, match="unit-step"):
        distribution(magnetization_observable(p), p, "coarse_grained_ppa", Thermal(1.0))


def test_missing_temperature_rejected():
    p = tf(4, 1.0)
    with pytest.raises(ValueError):
        distribution(kink_observable(p), p, "exact")
    with pytest.raises(ValueError):
        distribution(kink_observable(p), p, "nonsense", Thermal(1.0))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([4, 8, 12, 30]), st.floats(0, 3), st.floats(0, 1), st.floats(0, 20))
def test_exact_kinks_have_even_support(L, g, gamma, beta):
    p = tf(L, g, gamma)
    d = distribution(kink_observable(p), p, "exact", Thermal(beta))
    assert d.probs[1::2].max() <= 1e-10


def test_ppa_puts_weight_on_odd_kinks():
    p = tf(12, 0.5)
    d = distribution(kink_observable(p), p, "ppa", Thermal(0.5))
    assert d.probs[1::2].max() > 1e-4


def test_distributions_helper_matches_single_calls():
    p = tf(10, 0.7)
    out = fcs.distributions("magnetization", p, "exact", [0.1, 1.0, 4.0], threads=3)
    for beta, d in zip([0.1, 1.0, 4.0], out):
        ref = distribution(magnetization_observable(p), p, "exact", Thermal(beta))
        assert np.array_equal(d.probs, ref.probs)


# --- cumulants -----------------------------------------------------------------

def test_delta_cumulants():
    d = Distribution(np.array([3, 4, 5]), np.array([0.0, 1.0, 0.0]))
    assert cumulants(d, 6).kappa == pytest.approx((4, 0, 0, 0, 0, 0), abs=1e-14)
    with pytest.raises(ValueError):
        cumulants(d, 7)


@pytest.mark.parametrize("n,q", [(10, 0.5), (17, 0.3)])
def test_cumulants_against_scipy_binomial(n, q):
    k = np.arange(n + 1)
    d = Distribution(k, binom.pmf(k, n, q))
    mean, var, skew, kurt = binom.stats(n, q, moments="mvsk")
    ref = (mean, var, skew * var ** 1.5, kurt * var ** 2)
    assert cumulants(d).kappa == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_infinite_temperature_cumulants():
    for L in (8, 50):
        p = tf(L, 1.0)
        k = cumulants(distribution(kink_observable(p), p, "infinite_temperature"))
        assert k.kappa == pytest.approx((L / 2, L / 4, 0, -L / 8), abs=1e-9)
        m = cumulants(distribution(magnetization_observable(p), p, "infinite_temperature"))
        assert (m[1], m[2]) == pytest.approx((0, L), abs=1e-9)


def test_cumulants_match_log_char_fn_derivatives():
    # kappa_n = (-i d/dtheta)^n log P(theta) at 0, by central differences
    p = tf(8, 0.7)
    obs = kink_observable(p)
    th = Thermal(1.2)
    h = 1e-3
    f = lambda t: np.log(char_fn_exact(obs, p, th, t))
    k1 = ((f(h) - f(-h)) / (2 * h) / 1j).real
    k2 = -((f(h) - 2 * f(0.0) + f(-h)) / h ** 2).real
    k = cumulants(distribution(obs, p, "exact", th))
    assert k[1] == pytest.approx(k1, rel=1e-6)
    assert k[2] == pytest.approx(k2, rel=1e-5)


def test_ground_state_magnetization_variance():
    for L in (8, 12):
        for g in (0.25, 0.5, 0.9, 1.0, 2.0):
            p = tf(L, g)
            k = cumulants(distribution(magnetization_observable(p), p, "ground_state"))
            assert k[2] == pytest.approx(L * (1 + g ** (L - 2)) / (1 + g ** L), abs=1e-9)


def test_poissonian_crossover_kinks():
    betas = np.geomspace(0.1, 10, 25)

    def excess(g):
        p = tf(12, g)
        out = []
        for b in betas:
            k = cumulants(distribution(kink_observable(p), p, "exact", Thermal(b)))
            out.append(k[2] - k[1])
        return np.array(out)

    low = excess(0.5)
    assert low.min() < 0 < low.max()
    assert excess(2.0).max() < 0


def test_magnetization_super_poissonian_in_ferromagnet():
    p = tf(12, 0.5)
    for b in (0.1, 0.5, 1.0, 3.0, 10.0):
        k = cumulants(distribution(magnetization_observable(p), p, "exact", Thermal(b)))
        assert k[2] > k[1]


# --- coarse graining -------------------------------------------------------------

def test_coarse_graining_delta():
    d = Distribution(np.arange(5), np.array([0, 0, 1.0, 0, 0]))
    assert coarse_grained_ppa(d).probability(2) == pytest.approx(1.0)


def test_coarse_graining_folds_odd_weight():
    d = Distribution(np.arange(4), np.array([0.25, 0.25, 0.25, 0.25]))
    cg = coarse_grained_ppa(d)
    assert cg.probs[1::2].max() == 0 and cg.total == pytest.approx(1.0)
    # unnormalized: P(0)=0.25+0.125, P(2)=0.25+0.25 -> renormalized by 0.875
    assert cg.probs[[0, 2]] == pytest.approx([0.375 / 0.875, 0.5 / 0.875])


def test_coarse_grained_ppa_tracks_exact():
    p = tf(50, 1.5)
    obs = kink_observable(p)
    cg = distribution(obs, p, "coarse_grained_ppa", Thermal(1.0))
    ex = distribution(obs, p, "exact", Thermal(1.0))
    assert np.abs(cg.probs - ex.probs).max() <= 5e-3
