import math

import numpy as np
import pytest

from hullspec.bloch import (band_spectrum, bloch_vs_finite_volume, butterfly_csv, butterfly_rows,
                            fiber, fiber_stack, golden_section, hofstadter_fiber,
                            hofstadter_spectrum)
from hullspec.schrodinger import assemble_finite, laplacian, potential_model, random_spec
from hullspec.spectra import CompactRealSet, hausdorff_distance
from hullspec.symdyn import GOLDEN, MechanicalConfiguration, PeriodicConfiguration
from oracles import dense_band_union

SQ5 = math.sqrt(5.0)


def random_word(rng, p):
    while True:
        w = "".join(rng.choice(list("ab"), p))
        if PeriodicConfiguration(w).period == p:
            return w


def test_fiber_examples():
    L = laplacian()
    for k in (0.0, 0.3, 2.0):
        assert fiber(L, PeriodicConfiguration("a"), k).matrix.data[0, 0] == pytest.approx(2 * math.cos(k))
        alt = potential_model({"a": 0.7, "b": -0.7})
        ev = fiber(alt, PeriodicConfiguration("ab"), k).matrix.eigenvalues()
        r = math.sqrt(0.49 + 4 * math.cos(k) ** 2)
        assert np.allclose(ev, [-r, r], atol=1e-12)


def test_fiber_at_zero_is_ring():
    rng = np.random.default_rng(0)
    for p in (1, 2, 3, 5):
        spec = random_spec(rng, 1, 2)
        x = PeriodicConfiguration(random_word(rng, p))
        ring = assemble_finite(spec, x, p, "periodic").data
        assert np.allclose(fiber(spec, x, 0.0).matrix.data, ring, atol=1e-15)


def test_fiber_periodicity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        p = int(rng.integers(1, 6))
        spec = random_spec(rng, 1, 2)
        x = PeriodicConfiguration(random_word(rng, p))
        k = float(rng.uniform(0, 2 * np.pi))
        H = fiber_stack(spec, x, [k, k + 2 * np.pi, k + 2 * np.pi / p])
        assert np.allclose(H[0], H[1], atol=1e-12)
        assert np.allclose(np.linalg.eigvalsh(H[0]), np.linalg.eigvalsh(H[2]), atol=1e-12)


def test_nonperiodic_rejected():
    with pytest.raises(ValueError):
        fiber(laplacian(), MechanicalConfiguration(GOLDEN), 0.0)


def test_band_spectrum_closed_forms():
    bs = band_spectrum(laplacian(), PeriodicConfiguration("a"))
    assert hausdorff_distance(bs.spectrum, CompactRealSet.interval(-2, 2)) <= 1e-9
    assert bs.certificate.converged and bs.certificate.grid == 64
    alt = band_spectrum(potential_model({"a": 1, "b": -1}), PeriodicConfiguration("ab"))
    assert hausdorff_distance(alt.spectrum, CompactRealSet(((-SQ5, -1.0), (1.0, SQ5)))) <= 1e-8
    assert len(alt.bands) == 2


def test_band_spectrum_against_dense_sampling():
    rng = np.random.default_rng(2)
    for _ in range(10):
        p = int(rng.integers(1, 5))
        spec = random_spec(rng, 1, 2)
        x = PeriodicConfiguration(random_word(rng, p))
        bs = band_spectrum(spec, x, grid=16)
        ks = np.linspace(0, 2 * np.pi, 4001)
        dense = dense_band_union(lambda k: fiber(spec, x, k).matrix.data, ks)
        for (lo, hi), (dlo, dhi) in zip(bs.bands, dense):
            # refinement beats (or matches) a dense sample and is never far off
            assert lo <= dlo + 1e-12 and hi >= dhi - 1e-12
            assert dlo - lo < 1e-4 and hi - dhi < 1e-4


def test_sampled_eigenvalues_contained():
    rng = np.random.default_rng(3)
    spec = random_spec(rng, 1, 2)
    x = PeriodicConfiguration("aabab")
    bs = band_spectrum(spec, x)
    ks = rng.uniform(0, 2 * np.pi, 200)
    for ev in np.linalg.eigvalsh(fiber_stack(spec, x, ks)).ravel():
        assert bs.spectrum.contains(ev, 1e-10)


def test_potential_shift():
    rng = np.random.default_rng(4)
    spec = random_spec(rng)
    x = PeriodicConfiguration("aab")
    a = band_spectrum(spec, x)
    b = band_spectrum(spec.with_potential_shift(0.75), x)
    assert np.allclose(np.array(b.bands) - 0.75, a.bands, atol=1e-12)


def test_schur_bound():
    rng = np.random.default_rng(5)
    for _ in range(20):
        spec = random_spec(rng, 1, 2)
        bs = band_spectrum(spec, PeriodicConfiguration(random_word(rng, 3)), grid=16)
        assert bs.spectrum.max_abs() <= spec.hop_bound()


def test_bloch_vs_finite_volume_examples():
    assert bloch_vs_finite_volume(laplacian(), PeriodicConfiguration("a"), 6) < 1e-10
    alt = potential_model({"a": 1, "b": -1})
    assert bloch_vs_finite_volume(alt, PeriodicConfiguration("ab"), 4) < 1e-9
    rng = np.random.default_rng(6)
    spec = random_spec(rng)
    assert bloch_vs_finite_volume(spec, PeriodicConfiguration("aab"), 1) == 0.0


def test_bloch_vs_finite_volume_random():
    rng = np.random.default_rng(7)
    for _ in range(40):
        p = int(rng.integers(1, 6))
        M = int(rng.integers(1, 7))
        spec = random_spec(rng, int(rng.integers(0, 2)), int(rng.integers(1, 3)))
        assert bloch_vs_finite_volume(spec, PeriodicConfiguration(random_word(rng, p)), M) < 1e-8


def test_golden_section():
    x, fx, it, move, ok = golden_section(lambda t: (t - 0.3) ** 2, -1, 2, 1e-12)
    assert ok and abs(x - 0.3) < 1e-5 and fx < 1e-10
    *_, ok = golden_section(lambda t: (t - 0.3) ** 2, -1, 2, 1e-12, max_iter=3)
    assert not ok


def test_budget_exhaustion_reported():
    bs = band_spectrum(laplacian(), PeriodicConfiguration("a"), grid=8, max_iter=2)
    assert not bs.certificate.converged
    assert hausdorff_distance(bs.spectrum, CompactRealSet.interval(-2, 2)) < 0.1


# -- Hofstadter ------------------------------------------------------------

def test_hofstadter_fiber_examples():
    for k1, k2 in [(0.1, 0.2), (1.0, -0.5)]:
        h = hofstadter_fiber(0, 1, 0.5, k1, k2).data
        assert h.shape == (1, 1)
        assert h[0, 0].real == pytest.approx(2 * math.cos(k1) + math.cos(k2))
        ev = hofstadter_fiber(1, 2, 1.0, k1, k2).eigenvalues()
        r = math.sqrt(4 * math.cos(k1) ** 2 + 4 * math.cos(k2) ** 2)
        assert np.allclose(ev, [-r, r], atol=1e-12)
    with pytest.raises(ValueError):
        hofstadter_fiber(2, 4, 1.0, 0, 0)


def test_hofstadter_closed_forms():
    I = CompactRealSet.interval
    assert hausdorff_distance(hofstadter_spectrum(0, 1, 1.0), I(-4, 4)) <= 1e-6
    assert hausdorff_distance(hofstadter_spectrum(0, 1, 0.5), I(-3, 3)) <= 1e-6
    assert hausdorff_distance(hofstadter_spectrum(1, 2, 1.0), I(-2 * math.sqrt(2), 2 * math.sqrt(2))) <= 1e-6
    for p, q in [(1, 3), (2, 5)]:
        assert hausdorff_distance(hofstadter_spectrum(p, q, 0.0), I(-2, 2)) <= 1e-6


def test_hofstadter_third_flux():
    # flux 1/3: band edges at -1-sqrt3, -2, 1-sqrt3, sqrt3-1, 2, 1+sqrt3
    s3 = math.sqrt(3)
    expect = CompactRealSet(((-1 - s3, -2.0), (1 - s3, s3 - 1), (2.0, 1 + s3)))
    assert hausdorff_distance(hofstadter_spectrum(1, 3), expect) <= 1e-8


@pytest.mark.parametrize("p,q", [(1, 3), (2, 5), (3, 7), (1, 6)])
def test_reflection_and_particle_hole(p, q):
    a, b = hofstadter_spectrum(p, q), hofstadter_spectrum(q - p, q)
    assert hausdorff_distance(a, b) < 1e-8
    mirror = CompactRealSet.from_intervals((-hi, -lo) for lo, hi in a.intervals)
    assert hausdorff_distance(a, mirror) < 1e-8


def _torus_harper(p, q, L1, L2):
    # independent oracle: magnetic Laplacian on an L1 x L2 torus in Landau gauge
    B = 2 * np.pi * p / q
    N = L1 * L2
    H = np.zeros((N, N), dtype=complex)
    for n2 in range(L2):
        for n1 in range(L1):
            i = n1 + L1 * n2
            H[(n1 + 1) % L1 + L1 * n2, i] += 1
            H[n1 + L1 * ((n2 + 1) % L2), i] += np.exp(1j * B * n1)
    return H + H.conj().T


@pytest.mark.parametrize("p,q", [(1, 3), (2, 5), (1, 4)])
def test_hofstadter_contains_torus_spectrum(p, q):
    S = hofstadter_spectrum(p, q)
    ev = np.linalg.eigvalsh(_torus_harper(p, q, 4 * q, 12))
    assert all(S.contains(e, 1e-8) for e in ev)


def test_butterfly_csv():
    rows = butterfly_rows([(0, 1), (1, 2)], grid=16)
    text = butterfly_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "pflux,qflux,flux_real,band_lo,band_hi"
    assert len(lines) == 1 + 1 + 2
    assert lines[1].startswith("0,1,0,")
