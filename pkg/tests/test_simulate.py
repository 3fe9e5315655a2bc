import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deblur.core import DeblurError, frobenius_norm
from deblur.simulate import Psf, add_gaussian_noise, blur, disk_psf, noise_sigma

from oracles import lattice_disk

# lattice-point counts of the radius-r disk, enumerated in oracles.lattice_disk
DISK_COUNTS = {0.5: 1, 1: 5, 2: 13, 7: 149, 15: 709}


def support_offsets(psf):
    rows, cols = psf.shape
    out = set()
    for r, c in zip(*np.nonzero(psf.image)):
        dr = r if r <= rows // 2 else r - rows
        dc = c if c <= cols // 2 else c - cols
        out.add((int(dr), int(dc)))
    return out


@pytest.mark.parametrize("radius, count", sorted(DISK_COUNTS.items()))
def test_disk_counts_are_frozen_oracle_values(radius, count):
    assert len(lattice_disk(radius)) == count


def test_disk_radius_one_on_5x5():
    psf = disk_psf(5, 5, 1)
    assert np.count_nonzero(psf.image) == 5
    np.testing.assert_allclose(psf.image[psf.image > 0], 0.2, rtol=0, atol=1e-16)
    assert support_offsets(psf) == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert psf.center == (2, 2)
    assert psf.radius == 1.0


def test_disk_half_radius_is_identity():
    psf = disk_psf(5, 5, 0.5)
    expected = np.zeros((5, 5))
    expected[0, 0] = 1.0
    np.testing.assert_array_equal(psf.image, expected)


def test_disk_radius_15_on_512():
    psf = disk_psf(512, 512, 15)
    nz = psf.image[psf.image > 0]
    assert nz.size == DISK_COUNTS[15]
    np.testing.assert_array_equal(nz, 1.0 / DISK_COUNTS[15])
    assert support_offsets(psf) == lattice_disk(15)


@pytest.mark.parametrize("rows, cols, radius", [(0, 5, 1), (5, 5, 0), (5, 5, -1), (5, 5, 3),
                                                (64, 8, 5)])
def test_disk_rejects_bad_arguments(rows, cols, radius):
    with pytest.raises(DeblurError):
        disk_psf(rows, cols, radius)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.floats(0.05, 20))
def test_psf_sum_and_support(rows, cols, radius):
    if 2 * radius > min(rows, cols):
        with pytest.raises(DeblurError):
            disk_psf(rows, cols, radius)
        return
    psf = disk_psf(rows, cols, radius)
    assert abs(psf.image.sum() - 1.0) < 1e-12
    assert np.all(psf.image >= 0)
    assert support_offsets(psf) == lattice_disk(radius)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.1, 10))
def test_support_monotone_in_radius(r1, r2):
    lo, hi = sorted((r1, r2))
    assert support_offsets(disk_psf(24, 24, lo)) <= support_offsets(disk_psf(24, 24, hi))


def test_blur_with_delta_psf_is_identity(rng):
    f = rng.uniform(0, 255, (9, 11))
    np.testing.assert_allclose(blur(f, disk_psf(9, 11, 0.5)), f, atol=1e-10)


def test_blur_preserves_constants():
    np.testing.assert_allclose(blur(np.full((16, 16), 7.0), disk_psf(16, 16, 3)), 7.0, atol=1e-10)


def test_blur_matches_five_point_average(rng):
    f = rng.standard_normal((8, 8))
    expected = np.empty_like(f)
    for r in range(8):
        for c in range(8):
            expected[r, c] = (f[r, c] + f[(r + 1) % 8, c] + f[(r - 1) % 8, c]
                              + f[r, (c + 1) % 8] + f[r, (c - 1) % 8]) / 5
    assert np.max(np.abs(blur(f, disk_psf(8, 8, 1)) - expected)) < 1e-8


def test_blur_accepts_bare_kernel_and_checks_shape(rng):
    f = rng.standard_normal((8, 8))
    psf = disk_psf(8, 8, 2)
    np.testing.assert_array_equal(blur(f, psf), blur(f, psf.image))
    with pytest.raises(DeblurError):
        blur(f, disk_psf(8, 9, 2))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.5, 6))
def test_blur_preserves_mean_and_bounds(seed, radius):
    f = np.random.default_rng(seed).uniform(0, 255, (16, 16))
    out = blur(f, disk_psf(16, 16, radius))
    assert out.mean() == pytest.approx(f.mean(), rel=1e-10)
    assert np.max(np.abs(out)) <= np.max(np.abs(f)) + 1e-9


def test_noise_infinite_snr_is_noop(rng):
    g = rng.uniform(0, 255, (8, 8))
    out, rec = add_gaussian_noise(g, math.inf, 3)
    np.testing.assert_array_equal(out, g)
    assert rec.sigma == 0.0 and rec.realized_norm == 0.0 and rec.seed == 3


def test_noise_sigma_for_constant_image():
    assert noise_sigma(np.full((4, 4), 10.0), 40) == pytest.approx(0.1, rel=1e-14)
    _, rec = add_gaussian_noise(np.full((4, 4), 10.0), 40, 0)
    assert rec.sigma == pytest.approx(0.1, rel=1e-14)
    assert rec.snr_db == 40


def test_noise_is_deterministic_per_seed(rng):
    g = rng.uniform(0, 255, (32, 32))
    a, ra = add_gaussian_noise(g, 40, 11)
    b, rb = add_gaussian_noise(g, 40, 11)
    c, _ = add_gaussian_noise(g, 40, 12)
    assert a.tobytes() == b.tobytes() and ra == rb
    assert not np.array_equal(a, c)


def test_noise_record_matches_added_field(rng):
    g = rng.uniform(0, 255, (64, 64))
    noisy, rec = add_gaussian_noise(g, 30, 5)
    assert rec.realized_norm == pytest.approx(frobenius_norm(noisy - g), rel=1e-12)
    assert abs(rec.realized_norm / (rec.sigma * 64) - 1) < 0.2


def test_noise_statistics_are_standard_normal():
    g = np.full((256, 256), 100.0)
    noisy, rec = add_gaussian_noise(g, 0, 1)  # sigma = 100
    z = (noisy - g) / rec.sigma
    assert abs(z.mean()) < 0.02
    assert abs(z.std() - 1) < 0.02
    # fourth moment of a standard normal is 3
    assert abs(np.mean(z ** 4) - 3) < 0.1


def test_noise_norm_concentrates_at_512():
    g = np.random.default_rng(0).uniform(0, 255, (512, 512))
    for seed in range(10):
        _, rec = add_gaussian_noise(g, 40, seed)
        assert 0.99 <= rec.realized_norm / (rec.sigma * 512) <= 1.01


def test_noise_rejects_zero_signal_and_bad_seed():
    with pytest.raises(DeblurError):
        add_gaussian_noise(np.zeros((4, 4)), 40, 0)
    with pytest.raises(DeblurError):
        add_gaussian_noise(np.ones((4, 4)), 40, -1)


def test_psf_dataclass_holds_hand_built_kernels():
    k = np.zeros((4, 4))
    k[0, 0] = 1
    psf = Psf(k)
    assert psf.radius is None and psf.shape == (4, 4)
