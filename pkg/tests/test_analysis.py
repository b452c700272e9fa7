import numpy as np
import pytest

from conftest import MIN_RC, MIN_RLC, RC3G, build
from spmor import (
    FirstOrderSystem,
    GridMismatch,
    build_basis,
    compute_moments,
    linearize,
    make_operator,
    match_report,
    passivity_sample,
    prima_reduce,
    sprim_reduce,
    sweep,
    sweep_error,
)
from spmor.analysis import FrequencyResponse, sweep_points
from spmor.synthetic import random_higher_order, random_second_order, rlc_ladder


def contour_moments(fo, s0, k, radius, points=256):
    """Taylor coefficients of H about s0 by the trapezoid rule on a circle.

    c_i = (1/2 pi i) \\oint H(s) (s - s0)^{-i-1} ds and mu_i = (-1)^i c_i.
    """
    theta = 2 * np.pi * np.arange(points) / points
    z = radius * np.exp(1j * theta)
    Hs = np.array([fo.transfer(s0 + zk) for zk in z])
    out = []
    for i in range(k):
        c = np.tensordot(z ** (-i), Hs, axes=1) / points
        out.append((-1) ** i * c)
    return out


def test_minimal_rc_moments():
    _, _, fo = build(MIN_RC)
    t = compute_moments(fo, 0.0, 4)
    assert t.k == 4 and all(np.array_equal(mu, [[1.0]]) for mu in t.entries)
    assert compute_moments(fo, 0.0, 0).entries == ()


def test_minimal_rlc_moment_zero():
    _, _, fo = build(MIN_RLC)
    mu0 = compute_moments(fo, 1.0, 2).entries[0]
    assert mu0[0, 0] == pytest.approx(1 / 3, rel=1e-15)
    assert mu0[0, 0] == pytest.approx(fo.transfer(1.0)[0, 0], rel=1e-15)


@pytest.mark.parametrize("make, s0", [
    (lambda: linearize(random_second_order(7, 5, 2, m=2, hermitian=False))[0], 0.8 + 0.1j),
    (lambda: linearize(random_higher_order(3, 3, 2, m=1))[0], 0.5),
    (lambda: build(RC3G)[2], 0.0),
])
def test_moments_match_contour_oracle(make, s0):
    fo = make()
    poles = np.linalg.eigvals(np.linalg.solve(fo.E, fo.A)) if np.linalg.cond(fo.E) < 1e12 else None
    radius = 0.5 * (np.min(abs(poles - s0)) if poles is not None else 0.1)
    ref = contour_moments(fo, s0, 6, radius)
    got = compute_moments(fo, s0, 6).entries
    for a, b in zip(ref, got):
        assert np.linalg.norm(a - b) <= 1e-8 * np.linalg.norm(b) + 1e-12


def test_series_converges_to_transfer():
    fo, _ = linearize(random_second_order(12, 6, 3, m=2))
    s0 = 1.0
    t = compute_moments(fo, s0, 8)
    s = s0 + 1e-3 * np.exp(0.7j)
    H = fo.transfer(s)
    assert np.linalg.norm(t.series(s) - H) < 1e-6 * np.linalg.norm(H)


def test_d_folded_into_first_moment():
    fo = FirstOrderSystem(E=[[1.0]], A=[[-1.0]], B=[[1.0]], L=[[1.0]], D=[[2.0]])
    t = compute_moments(fo, 0.0, 3)
    assert [mu[0, 0] for mu in t.entries] == [3.0, 1.0, 1.0]


def test_match_report_full_basis_and_bounds():
    sys = random_second_order(5, 5, 2, m=1)
    fo, lmap = linearize(sys)
    b = build_basis(make_operator(fo, 1.0))
    rep = match_report(fo, prima_reduce(fo, b), 1.0, 8, 1e-8)
    assert rep.matched_count == 8 == rep.k
    r = sprim_reduce(sys, fo, lmap, b.truncate(1))
    assert match_report(fo, r, 1.0, 3, 1e-6).expected_bound == 2
    assert match_report(fo, r, 1.0 + 0.5j, 3, 1e-6).expected_bound == 1
    assert match_report(fo, prima_reduce(fo, b.truncate(1)), 1.0, 3).expected_bound == 1


def test_ladder_match_reports():
    _, so, fo = build(RC3G)
    fo, lmap = linearize(so)
    b = build_basis(make_operator(fo, 0.0), 2)
    assert match_report(fo, prima_reduce(fo, b), 0.0, 5, 1e-8).matched_count >= 2
    assert match_report(fo, sprim_reduce(so, fo, lmap, b), 0.0, 5, 1e-6).matched_count >= 4


def test_sweep_minimal_rc():
    _, _, fo = build(MIN_RC)
    r = sweep(fo, 1 / (2 * np.pi), 10.0, 5)
    assert abs(r.H[0, 0, 0]) == pytest.approx(1 / np.sqrt(2), rel=1e-14)
    assert np.all(np.diff(r.f) > 0) and r.failed == ()
    header = r.to_csv().splitlines()[0]
    assert header == "f_hz,re(H_1_1),im(H_1_1),abs(H_1_1)"


def test_sweep_failed_point_recorded():
    fo = FirstOrderSystem(E=np.eye(2), A=[[0.0, -1.0], [1.0, 0.0]], B=[[1.0], [0.0]], L=[[1.0, 0.0]])
    r = sweep_points(fo, [0.1, 1 / (2 * np.pi), 0.3])
    assert r.failed == (1,) and np.isnan(r.H[1]).all() and np.isfinite(r.H[0]).all()


def test_sweep_parallel_equals_serial():
    _, _, fo = build(rlc_ladder(6, 3))
    a = sweep(fo, 1e8, 1e10, 40)
    b = sweep(fo, 1e8, 1e10, 40, workers=4)
    assert np.array_equal(a.H, b.H)


def test_full_basis_sweep_identical():
    _, so, _ = build(rlc_ladder(4, 1))
    fo, lmap = linearize(so)
    b = build_basis(make_operator(fo, 2 * np.pi * 1e9))
    e = sweep_error(sweep(fo, 1e8, 1e10, 30), sweep(sprim_reduce(so, fo, lmap, b), 1e8, 1e10, 30))
    assert e.max < 1e-10


def test_sweep_error_metrics():
    f = np.array([1.0, 2.0, 3.0])
    H = np.ones((3, 1, 2), dtype=complex)
    a = FrequencyResponse(f, H)
    assert sweep_error(a, a).max == 0.0
    H2 = H.copy()
    H2[1, 0, 0] = 2.0
    e = sweep_error(a, FrequencyResponse(f, H2))
    assert e.max == pytest.approx(1 / np.sqrt(2)) and e.per_point[0] == 0 and e.per_point[2] == 0
    with pytest.raises(GridMismatch):
        sweep_error(a, FrequencyResponse(f * 2, H))


def test_ladder_sprim_beats_prima_over_a_decade():
    _, so, _ = build(rlc_ladder(6, seed=7))
    fo, lmap = linearize(so)
    s0 = 2 * np.pi * 1e9
    b = build_basis(make_operator(fo, s0)).truncate(2)
    ex = sweep(fo, 10 ** 8.5, 10 ** 9.5, 60)
    ep = sweep_error(ex, sweep(prima_reduce(fo, b), 10 ** 8.5, 10 ** 9.5, 60))
    es = sweep_error(ex, sweep(sprim_reduce(so, fo, lmap, b), 10 ** 8.5, 10 ** 9.5, 60))
    assert es.max <= ep.max


def test_passivity_samples():
    assert passivity_sample(build(MIN_RC)[2], [1.0])
    assert passivity_sample(build(MIN_RLC)[1], [1 + 1j])
    rng = np.random.default_rng(0)
    _, so, _ = build(rlc_ladder(10, 2, couplings=4))
    pts = 2 * np.pi * 1e9 * (rng.uniform(0.01, 5, 20) + 1j * rng.uniform(-5, 5, 20))
    rep = passivity_sample(so, pts)
    assert rep.ok and len(rep.points) == 20
    active = FirstOrderSystem(E=[[1.0]], A=[[-1.0]], B=[[1.0]], L=[[-1.0]])
    assert not passivity_sample(active, [1.0])
    with pytest.raises(ValueError):
        passivity_sample(active, [-1.0])
