"""2-D DFT helpers with a single, fixed scaling convention.

Forward transform is unscaled,

    F(u, v) = sum_x sum_y f(x, y) exp(-2 pi i (u x / M + v y / N)),

and the inverse carries the 1/(M N) factor.  Norms taken in the Fourier
domain carry the compensating 1/sqrt(M N), so `spectral_norm(dft2(x))`
equals `frobenius_norm(x)`.

Spectra are complex numpy arrays with the same shape as the image they
came from.  Convolution is circular (periodic boundary), which is what makes
the blur operator diagonal in this basis.
"""
import logging

import numpy as np

from .core import DeblurError, as_image, check_same_shape

__all__ = [
    "IMAG_RESIDUE_TOL",
    "dft2",
    "idft2",
    "spectral_norm",
    "circular_convolve",
    "circular_shift",
]

log = logging.getLogger(__name__)

IMAG_RESIDUE_TOL = 1e-8


def dft2(img):
    """Unscaled forward DFT of a real image.

    The result is made exactly Hermitian, ``F(-u, -v) == conj(F(u, v))``
    bit for bit.  Raw FFT output is symmetric only to rounding, and CG
    recurrences amplify that mismatch until the restored image picks up a
    visible imaginary part.
    """
    spec = np.fft.fft2(as_image(img))
    mirrored = np.conj(np.roll(spec[::-1, ::-1], 1, axis=(0, 1)))
    return 0.5 * (spec + mirrored)


def idft2(spec):
    """Inverse DFT, returned as a real image.

    The imaginary part is dropped.  If its max-abs exceeds `IMAG_RESIDUE_TOL`
    (relative to the largest real sample once that exceeds 1) the spectrum
    was not conjugate-symmetric and a warning is logged.
    """
    spec = np.asarray(spec, dtype=np.complex128)
    if spec.ndim != 2:
        raise DeblurError(f"spectrum must be 2-D, got shape {spec.shape}")
    out = np.fft.ifft2(spec)
    residue = float(np.max(np.abs(out.imag)))
    scale = max(1.0, float(np.max(np.abs(out.real))))
    if residue > IMAG_RESIDUE_TOL * scale:
        log.warning("idft2: discarding imaginary residue of max-abs %.3e", residue)
    return np.ascontiguousarray(out.real)


def spectral_norm(spec):
    spec = np.asarray(spec)
    return float(np.sqrt(np.sum(np.abs(spec) ** 2) / spec.size))


def circular_convolve(f, k):
    f = as_image(f, "f")
    k = as_image(k, "kernel")
    check_same_shape(f, k, "image and kernel")
    return idft2(dft2(f) * dft2(k))


def circular_shift(img, dr, dc):
    """out[r, c] = img[(r - dr) mod rows, (c - dc) mod cols]"""
    return np.roll(as_image(img), (int(dr), int(dc)), axis=(0, 1))
