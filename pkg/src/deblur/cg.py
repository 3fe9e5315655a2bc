"""Conjugate gradient on the normal equations, carried out in the Fourier domain.

The normal operator ``K^T K`` is diagonal under the DFT, with entries
``|K^|^2``, so every CG step is a handful of pointwise array operations.
The only transforms are the forward ones on the data and the PSF, and a
single inverse transform of the final iterate.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .core import DeblurError, as_image, check_same_shape
from .fourier import dft2, idft2, spectral_norm
from .simulate import kernel_of

__all__ = ["DEFAULT_ITERS", "DEFAULT_K_CAP", "CgBreakdown", "CgRecord", "CgTrace", "cg_deblur"]

DEFAULT_ITERS = 50
DEFAULT_K_CAP = 500


class CgBreakdown(DeblurError):
    pass


@dataclass(frozen=True)
class CgRecord:
    """State after `k` iterations.

    `alpha` and `beta` are the step coefficients that produced this state;
    both are NaN for ``k = 0``.  `normal_residual_norm` is the norm of the
    normal-equation residual ``K^T (g - K f_k)``, `residual_norm` the norm
    of ``K f_k - g``.  All norms are spatial-domain equivalents.
    """
    k: int
    residual_norm: float
    normal_residual_norm: float
    solution_norm: float
    relative_error: float | None
    alpha: float
    beta: float


@dataclass
class CgTrace:
    records: list[CgRecord] = field(default_factory=list)
    stop_reason: str = ""

    @property
    def iterations(self):
        return len(self.records) - 1

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)


def cg_deblur(g, psf, iters=DEFAULT_ITERS, *, epsilon=None, k_cap=DEFAULT_K_CAP, truth=None):
    """Restore `g` by CG iterations on ``|K^|^2 f^ = conj(K^) g^``.

    Parameters
    ----------
    g : array_like
        Observed image.
    psf : Psf or array_like
        Blur kernel in wraparound layout.
    iters : int
        Number of iterations in fixed-count mode.  Ignored when `epsilon`
        is given.
    epsilon : float, optional
        Switches to discrepancy stopping: iterate until
        ``||K f_k - g|| <= epsilon`` or `k_cap` iterations have run.
    k_cap : int
        Iteration cap for discrepancy mode.
    truth : array_like, optional
        Ground truth; when given, every trace record carries the relative
        restoration error of its iterate.

    Returns
    -------
    restored : ndarray
    trace : CgTrace
        One record per iterate, including the starting point ``f_0 = 0``.
    """
    g = as_image(g, "g")
    kernel = kernel_of(psf)
    check_same_shape(g, kernel, "image and PSF")
    if epsilon is None:
        if iters < 0:
            raise DeblurError(f"iteration count must be nonnegative, got {iters}")
        limit = int(iters)
    else:
        if not epsilon > 0:
            raise DeblurError(f"discrepancy level must be positive, got {epsilon}")
        if k_cap < 1:
            raise DeblurError(f"k_cap must be at least 1, got {k_cap}")
        limit = int(k_cap)

    otf = dft2(kernel)
    data = dft2(g)
    power = np.abs(otf) ** 2
    truth_spec = None
    truth_norm = None
    if truth is not None:
        truth = as_image(truth, "truth")
        check_same_shape(g, truth, "image and ground truth")
        truth_spec = dft2(truth)
        truth_norm = spectral_norm(truth_spec)
        if truth_norm == 0.0:
            raise DeblurError("relative error is undefined for an all-zero ground truth")

    f = np.zeros_like(data)
    r = np.conj(otf) * data
    p = r.copy()
    rr = float(np.vdot(r, r).real)

    trace = CgTrace()

    def record(k, alpha, beta):
        rel = None
        if truth_spec is not None:
            rel = spectral_norm(f - truth_spec) / truth_norm
        trace.records.append(CgRecord(
            k=k,
            residual_norm=spectral_norm(otf * f - data),
            normal_residual_norm=math.sqrt(rr / f.size),
            solution_norm=spectral_norm(f),
            relative_error=rel,
            alpha=alpha,
            beta=beta,
        ))

    record(0, math.nan, math.nan)
    k = 0
    while True:
        if epsilon is not None and trace.records[-1].residual_norm <= epsilon:
            trace.stop_reason = "discrepancy"
            break
        if k >= limit:
            trace.stop_reason = "k_cap" if epsilon is not None else "iterations"
            break
        if rr == 0.0:
            trace.stop_reason = "exact"
            break
        curvature = float(np.sum(power * np.abs(p) ** 2))
        if not curvature > 0.0:
            raise CgBreakdown(f"zero curvature at iteration {k} with nonzero residual")
        alpha = rr / curvature
        f = f + alpha * p
        r = r - alpha * power * p
        rr_next = float(np.vdot(r, r).real)
        beta = rr_next / rr
        p = r + beta * p
        rr = rr_next
        k += 1
        record(k, alpha, beta)

    return idft2(f), trace
