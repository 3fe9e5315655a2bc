"""Out-of-focus degradation: disk PSF, circular blur, Gaussian noise at a given SNR."""
from dataclasses import dataclass
import math

import numpy as np

from .core import DeblurError, as_image, check_same_shape, frobenius_norm
from .fourier import circular_convolve, circular_shift

__all__ = [
    "Psf",
    "NoiseRealization",
    "disk_psf",
    "disk_support",
    "kernel_of",
    "blur",
    "add_gaussian_noise",
    "gaussian_field",
    "noise_sigma",
]


@dataclass(frozen=True, eq=False)
class Psf:
    """A blur kernel stored in wraparound layout (its center sits at index (0, 0)).

    `radius` and `center` describe how a disk kernel was built; they are
    ``None`` for kernels assembled by hand.
    """
    image: np.ndarray
    radius: float | None = None
    center: tuple[int, int] | None = None

    @property
    def shape(self):
        return self.image.shape


@dataclass(frozen=True)
class NoiseRealization:
    sigma: float
    seed: int
    realized_norm: float
    snr_db: float


def kernel_of(psf):
    """Accept either a `Psf` or a bare kernel array."""
    return as_image(psf.image if isinstance(psf, Psf) else psf, "psf")


def disk_support(rows, cols, radius):
    """Boolean mask of lattice points within `radius` of (rows//2, cols//2)."""
    k, l = rows // 2, cols // 2
    y, x = np.ogrid[0:rows, 0:cols]
    return (y - k) ** 2 + (x - l) ** 2 <= radius * radius


def disk_psf(rows, cols, radius):
    """Uniform disk PSF of the given radius, normalized to unit sum.

    The disk is built around the geometric center ``(rows//2, cols//2)`` and
    then shifted so the center lands on (0, 0).  Each sample in the support
    equals ``1 / count`` where count is the number of lattice points covered.
    """
    if rows < 1 or cols < 1:
        raise DeblurError(f"PSF dimensions must be positive, got {rows}x{cols}")
    if not radius > 0:
        raise DeblurError(f"blur radius must be positive, got {radius}")
    if 2 * radius > min(rows, cols):
        raise DeblurError(
            f"disk diameter {2 * radius} exceeds grid size {min(rows, cols)}; "
            "the PSF would overlap itself under wraparound")
    mask = disk_support(rows, cols, radius)
    centered = mask / np.count_nonzero(mask)
    k, l = rows // 2, cols // 2
    return Psf(image=circular_shift(centered, -k, -l), radius=float(radius), center=(k, l))


def blur(f, psf):
    f = as_image(f, "f")
    kernel = kernel_of(psf)
    check_same_shape(f, kernel, "image and PSF")
    return circular_convolve(f, kernel)


def noise_sigma(g, snr_db):
    """Noise standard deviation giving ``10 log10(mean(g^2) / sigma^2) = snr_db``."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    power = float(np.mean(np.square(g)))
    if power == 0.0:
        raise DeblurError("SNR is undefined for an all-zero signal")
    return math.sqrt(power / 10.0 ** (snr_db / 10.0))


def gaussian_field(shape, seed):
    """Standard normal samples via Box-Muller on numpy's PCG64 generator.

    Two uniform streams are drawn from ``np.random.Generator(PCG64(seed))``,
    u1 for the radius and u2 for the angle; ``1 - u1`` keeps the log finite.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    u1 = rng.random(shape)
    u2 = rng.random(shape)
    return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)


def add_gaussian_noise(g, snr_db, seed):
    """Add i.i.d. zero-mean Gaussian noise at the requested SNR.

    Parameters
    ----------
    g : array_like
        Noise-free (blurred) image.  Its mean power defines the signal level.
    snr_db : float
        Target signal-to-noise ratio in decibels; ``inf`` adds no noise.
    seed : int
        Unsigned 64-bit seed for the generator.

    Returns
    -------
    noisy : ndarray
    realization : NoiseRealization
        Carries sigma and the Frobenius norm of the noise actually added,
        which is the discrepancy level used by the parameter selectors.
    """
    g = as_image(g, "g")
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise DeblurError(f"seed must be an unsigned 64-bit integer, got {seed}")
    sigma = noise_sigma(g, snr_db)
    if sigma == 0.0:
        return g.copy(), NoiseRealization(0.0, seed, 0.0, float(snr_db))
    noise = sigma * gaussian_field(g.shape, seed)
    return g + noise, NoiseRealization(sigma, seed, frobenius_norm(noise), float(snr_db))
