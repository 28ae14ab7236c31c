import math

import numpy as np
import pytest
from scipy.integrate import quad

from deltawall import (
    DEFAULT_CONFIG,
    BranchError,
    DomainError,
    SideLabel,
    UnsupportedEndpointError,
    WallState,
    WellConfig,
    characteristic_value,
    characteristic_value_negative,
    eigenfunction,
    exceptional_levels,
    separated_spectrum,
    solve_spectrum,
    unperturbed_energy,
)
from deltawall.spectrum import ground_negative_threshold

GS = DEFAULT_CONFIG.g_star

# Lowest six eigenvalues from the root solver, frozen when the suite was
# written.  The truncated-basis values at N=4096 sit above them by at most
# 2.5e-4 relative, except the bound state at g=-10g* (see test_oracle).
FROZEN = {
    (0.41, 1): [7.32794968360327, 20.65481940881146, 45.727964976998166, 81.53731823960669, 123.44648067645188, 180.71293680130466],
    (0.41, -1): [1.409372456949241, 18.875323276139362, 42.99791347422448, 76.42412335844531, 123.29275072771951, 174.54330298305754],
    (0.41, 10): [12.654607595070896, 25.716328117391534, 52.00298255576006, 98.89477015605625, 124.0828576580386, 201.8580253661997],
    (0.41, -10): [-123.369424306069, 15.587322371457661, 34.153256908181056, 63.305621808206645, 122.57489160046133, 151.02886178698407],
    (0.31, 1): [6.575873042829193, 22.468680053956124, 44.56654231026592, 80.35050695148368, 126.43748692150197, 178.23555281364486],
    (0.31, -1): [2.0549599553271705, 17.185449102849354, 44.26768796236594, 77.41139487308843, 120.33697001032877, 177.0970240693446],
    (0.31, 10): [9.501050004049361, 35.57767827839857, 46.137953606125926, 87.1940820117653, 147.30879567660412, 184.16022737226888],
    (0.31, -10): [-123.35550335359265, 11.398585215887715, 43.304847033691274, 63.55072783887781, 103.03318489642066, 173.33048284021422],
}


def test_unperturbed_energies():
    assert unperturbed_energy(1) == pytest.approx(4.9348022, abs=1e-7)
    assert unperturbed_energy(2) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert unperturbed_energy(3, WellConfig(length=2.0)) == pytest.approx(9 * math.pi**2 / 8, rel=1e-15)
    with pytest.raises(DomainError):
        unperturbed_energy(0)


def test_reference_scales():
    assert DEFAULT_CONFIG.e_star == pytest.approx(math.pi**2 / 2)
    assert GS == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_frozen_values(key):
    x, m = key
    got = solve_spectrum(WallState(m * GS, x), 6).energies
    np.testing.assert_allclose(got, FROZEN[key], rtol=1e-12)


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_roots_zero_the_characteristic_function(key):
    x, m = key
    wall = WallState(m * GS, x)
    for lv in solve_spectrum(wall, 6).levels:
        if lv.energy > 0:
            # relative to the size of the terms being cancelled
            scale = lv.k * (1 + abs(DEFAULT_CONFIG.coupling(wall.g)))
            assert abs(characteristic_value(lv.k, wall)) < 1e-10 * scale
        else:
            v = characteristic_value_negative(lv.kappa, wall)
            scale = lv.kappa * math.exp(lv.kappa * 1.0)
            assert abs(v) < 1e-10 * scale


def test_characteristic_value_at_g_zero_is_bare_well():
    k = np.linspace(0.3, 20, 50)
    np.testing.assert_allclose(characteristic_value(k, WallState(0.0, 0.41)), k * np.sin(k))


def test_characteristic_value_rejects_bad_input():
    with pytest.raises(BranchError):
        characteristic_value(1.0, WallState(math.inf, 0.4))
    with pytest.raises(DomainError):
        characteristic_value(0.0, WallState(1.0, 0.4))


def test_g_zero_returns_unperturbed():
    spec = solve_spectrum(WallState(0.0, 0.41), 5)
    np.testing.assert_allclose(spec.energies, [unperturbed_energy(n) for n in range(1, 6)], rtol=1e-15)


def test_separated_labels_at_infinity():
    spec = solve_spectrum(WallState(math.inf, 0.41), 4)
    assert [str(s) for s in spec.labels()] == ["R1", "L1", "R2", "L2"]
    e = spec.energies
    assert e[0] == pytest.approx((math.pi / 0.59) ** 2 / 2)
    assert e[1] == pytest.approx((math.pi / 0.41) ** 2 / 2)


def test_degeneracy_at_one_third():
    spec = separated_spectrum(1 / 3, 3)
    assert [str(s) for s in spec.labels()] == ["R1", "L1", "R2"]
    assert spec[2].energy == pytest.approx(spec[3].energy, rel=1e-12)


def test_midpoint_degeneracy_left_first():
    spec = separated_spectrum(0.5, 4)
    assert [str(s) for s in spec.labels()] == ["L1", "R1", "L2", "R2"]
    assert spec[1].energy == pytest.approx(spec[2].energy, rel=1e-14)


def test_minus_infinity_is_a_path_limit():
    with pytest.raises(UnsupportedEndpointError):
        solve_spectrum(WallState(-math.inf, 0.41), 3)


@pytest.mark.parametrize("x", [0.0, 1.0, -0.1, 1.5])
def test_wall_must_be_inside(x):
    with pytest.raises(DomainError):
        solve_spectrum(WallState(1.0, x), 3)


def test_exceptional_levels_at_midpoint():
    assert exceptional_levels(0.5, 6) == {2, 4, 6}
    spec = solve_spectrum(WallState(5 * GS, 0.5), 4)
    assert spec.exceptional == {2, 4}
    assert spec[2].energy == unperturbed_energy(2)
    assert spec[4].energy == unperturbed_energy(4)


def test_exceptional_levels_at_one_third():
    assert exceptional_levels(1 / 3, 6) == {3, 6}


@pytest.mark.parametrize("x", [0.41, 0.31])
def test_monotone_in_g(x):
    gs = np.concatenate([-np.geomspace(10, 0.01, 12), [0.0], np.geomspace(0.01, 50, 14)]) * GS
    table = np.array([solve_spectrum(WallState(g, x), 6).energies for g in gs])
    assert np.all(np.diff(table, axis=0) > 0)


@pytest.mark.parametrize("x", [0.41, 0.31])
def test_levels_stay_between_neighbouring_limits(x):
    # E_n(0) <= E_n(g) <= E_n(inf) <= E_{n+1}(0) for g >= 0, and the mirror for g < 0
    e0 = [unperturbed_energy(n) for n in range(1, 8)]
    einf = separated_spectrum(x, 7).energies
    for g in np.geomspace(0.05, 40, 10) * GS:
        e = solve_spectrum(WallState(g, x), 6).energies
        assert np.all(e > e0[:6]) and np.all(e < einf[:6])
    for g in -np.geomspace(0.05, 40, 10) * GS:
        e = solve_spectrum(WallState(g, x), 6).energies
        assert np.all(e < e0[:6])
        assert np.all(e[1:] > einf[:5])


def test_at_most_one_negative_level():
    for g in -np.geomspace(0.1, 200, 25) * GS:
        e = solve_spectrum(WallState(g, 0.41), 6).energies
        assert np.sum(e < 0) <= 1


def test_threshold_value():
    assert ground_negative_threshold(0.5) == pytest.approx(-2.0, rel=1e-15)
    assert ground_negative_threshold(0.41) == pytest.approx(-1 / (2 * 0.41 * 0.59), rel=1e-15)
    g_th = ground_negative_threshold(0.41)
    assert solve_spectrum(WallState(g_th * (1 - 1e-6), 0.41), 1)[1].energy > 0
    assert solve_spectrum(WallState(g_th * (1 + 1e-6), 0.41), 1)[1].energy < 0


def test_deep_bound_state_approaches_free_delta():
    # an isolated attractive delta binds at -m g^2 / (2 hbar^2)
    g = -200.0
    e = solve_spectrum(WallState(g, 0.5), 1)[1].energy
    assert e == pytest.approx(-g**2 / 2, rel=1e-12)


@pytest.mark.parametrize("g", [10 * GS, GS, -GS, -10 * GS, -1.99])
@pytest.mark.parametrize("x", [0.41, 0.31])
def test_eigenfunctions(g, x):
    wall = WallState(g, x)
    c = DEFAULT_CONFIG.coupling(g)
    for lv in solve_spectrum(wall, 4).levels:
        psi = eigenfunction(lv, wall)
        assert psi.value_left() == pytest.approx(psi.value_right(), abs=1e-10)
        assert psi.jump() == pytest.approx(c * psi.value_left(), abs=1e-8 * (1 + abs(c)))
        norm = quad(lambda t: psi(t) ** 2, 0, x, limit=200)[0] + quad(lambda t: psi(t) ** 2, x, 1, limit=200)[0]
        assert norm == pytest.approx(1.0, abs=1e-10)
        assert psi(0.0) == pytest.approx(0.0, abs=1e-12) and psi(1.0) == pytest.approx(0.0, abs=1e-12)


def test_separated_eigenfunction_lives_on_one_side():
    wall = WallState(math.inf, 0.41)
    lv = solve_spectrum(wall, 1)[1]
    assert lv.side == SideLabel("R", 1)
    psi = eigenfunction(lv, wall)
    xs = np.linspace(0, 0.41, 50)
    assert np.all(psi(xs) == 0.0)
    assert quad(lambda t: psi(t) ** 2, 0.41, 1)[0] == pytest.approx(1.0, abs=1e-12)


def test_eigenfunctions_are_orthogonal():
    wall = WallState(3 * GS, 0.37)
    fs = [eigenfunction(lv, wall) for lv in solve_spectrum(wall, 4).levels]
    for i in range(4):
        for j in range(i + 1, 4):
            ov = quad(lambda t: fs[i](t) * fs[j](t), 0, 0.37, limit=200)[0]
            ov += quad(lambda t: fs[i](t) * fs[j](t), 0.37, 1, limit=200)[0]
            assert abs(ov) < 1e-9


def test_scaling_with_well_parameters():
    cfg = WellConfig(length=2.0, hbar=1.5, mass=0.7)
    base = solve_spectrum(WallState(4.0 * GS, 0.41), 4).energies
    # g* carries no mass, so the dimensionless coupling 2 m g L / hbar^2 needs g / m
    g = 4.0 * cfg.g_star / cfg.mass
    got = solve_spectrum(WallState(g, 0.41 * 2.0), 4, cfg).energies
    np.testing.assert_allclose(got / cfg.e_star, base / DEFAULT_CONFIG.e_star, rtol=1e-11)
