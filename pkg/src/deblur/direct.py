"""One-shot spectral restorations and regularization-parameter selection.

All quantities are evaluated per frequency.  With ``s = |K^|`` the Tikhonov
restoration is ``conj(K^) g^ / (s^2 + mu)``, and its solution and residual
norms follow from Parseval without leaving the Fourier domain.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from .core import DeblurError, as_image, check_same_shape
from .fourier import dft2, idft2
from .simulate import kernel_of

__all__ = [
    "MU_MIN",
    "MU_MAX",
    "MuSelection",
    "TikhonovProblem",
    "pseudo_inverse_deblur",
    "tikhonov_deblur",
    "tikhonov_norms",
    "select_mu_energy",
    "select_mu_discrepancy",
    "select_mu_miller",
    "gcv_value",
    "gcv_grid",
    "select_mu_gcv",
]

log = logging.getLogger(__name__)

MU_MIN = 1e-12
MU_MAX = 1e3
BISECTION_RTOL = 1e-6
BISECTION_MAX_ITER = 200

GCV_GRID_MIN = 1e-10
GCV_GRID_MAX = 1e2
GCV_GRID_POINTS = 121
GCV_RTOL = 1e-4

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MuSelection:
    criterion: str
    mu: float
    evaluations: int
    bracket: tuple[float, float] | None
    converged: bool


class TikhonovProblem:
    """Spectra of one (observation, PSF) pair, reused across many values of mu.

    Parameters
    ----------
    g : array_like
        Observed image.
    psf : Psf or array_like
        Blur kernel in wraparound layout, same shape as `g`.
    """

    def __init__(self, g, psf):
        g = as_image(g, "g")
        kernel = kernel_of(psf)
        check_same_shape(g, kernel, "image and PSF")
        self.shape = g.shape
        self.size = g.size
        self.otf = dft2(kernel)
        self.data = dft2(g)
        self.otf_power = np.abs(self.otf) ** 2
        self.data_abs = np.abs(self.data)

    def restore_spectrum(self, mu):
        denom = self.otf_power + mu
        singular = denom == 0.0
        if np.any(singular):
            log.warning("tikhonov: %d frequencies with |K^| = 0 and mu = 0 set to zero",
                        int(np.count_nonzero(singular)))
            denom = np.where(singular, 1.0, denom)
            return np.where(singular, 0.0, np.conj(self.otf) * self.data / denom)
        return np.conj(self.otf) * self.data / denom

    def restore(self, mu):
        return idft2(self.restore_spectrum(mu))

    def solution_norm(self, mu):
        terms = np.sqrt(self.otf_power) * self.data_abs / (self.otf_power + mu)
        return float(np.sqrt(np.sum(terms ** 2) / self.size))

    def residual_norm(self, mu):
        terms = mu * self.data_abs / (self.otf_power + mu)
        return float(np.sqrt(np.sum(terms ** 2) / self.size))

    def gcv(self, mu):
        filt = 1.0 / (self.otf_power + mu)
        return float(np.sum((self.data_abs * filt) ** 2) / np.sum(filt) ** 2)


def pseudo_inverse_deblur(g, psf, tol=0.0):
    """Divide the observed spectrum by the OTF.

    Frequencies with ``|K^| <= tol`` are set to zero.  With ``tol=0`` this is
    the plain inverse filter, which blows noise up wherever the OTF is small.
    """
    if tol < 0:
        raise DeblurError(f"tol must be nonnegative, got {tol}")
    prob = TikhonovProblem(g, psf)
    keep = np.abs(prob.otf) > tol
    spec = np.zeros_like(prob.data)
    spec[keep] = prob.data[keep] / prob.otf[keep]
    return idft2(spec)


def tikhonov_deblur(g, psf, mu):
    if mu < 0:
        raise DeblurError(f"mu must be nonnegative, got {mu}")
    return TikhonovProblem(g, psf).restore(mu)


def tikhonov_norms(g, psf, mu):
    """Return ``(||f_mu||, ||K * f_mu - g||)`` for the Tikhonov solution f_mu."""
    prob = TikhonovProblem(g, psf)
    return prob.solution_norm(mu), prob.residual_norm(mu)


def _bisect_log_mu(func, target, increasing, criterion):
    # func(mu) is monotone in mu; find func(mu) == target on [MU_MIN, MU_MAX]
    lo, hi = math.log(MU_MIN), math.log(MU_MAX)
    f_lo, f_hi = func(MU_MIN), func(MU_MAX)
    evaluations = 2
    below_range = target <= f_lo if increasing else target >= f_lo
    above_range = target >= f_hi if increasing else target <= f_hi
    if below_range:
        return MuSelection(criterion, MU_MIN, evaluations, (MU_MIN, MU_MAX), False)
    if above_range:
        return MuSelection(criterion, MU_MAX, evaluations, (MU_MIN, MU_MAX), False)

    converged = False
    for _ in range(BISECTION_MAX_ITER):
        if math.expm1(hi - lo) < BISECTION_RTOL:
            converged = True
            break
        mid = 0.5 * (lo + hi)
        value = func(math.exp(mid))
        evaluations += 1
        if (value < target) == increasing:
            lo = mid
        else:
            hi = mid
    mu = math.exp(0.5 * (lo + hi))
    return MuSelection(criterion, mu, evaluations, (math.exp(lo), math.exp(hi)), converged)


def select_mu_energy(g, psf, energy):
    """Pick mu so that the restoration has norm `energy`.

    The solution norm decreases strictly with mu, so this is a bisection on
    log(mu) over [MU_MIN, MU_MAX].  A prescription outside the reachable
    range returns the nearer bracket end with ``converged=False``.
    """
    if not energy > 0:
        raise DeblurError(f"prescribed energy must be positive, got {energy}")
    prob = g if isinstance(g, TikhonovProblem) else TikhonovProblem(g, psf)
    return _bisect_log_mu(prob.solution_norm, energy, increasing=False, criterion="energy")


def select_mu_discrepancy(g, psf, epsilon):
    """Pick mu so that the residual norm equals the noise norm `epsilon`."""
    if not epsilon > 0:
        raise DeblurError(f"prescribed discrepancy must be positive, got {epsilon}")
    prob = g if isinstance(g, TikhonovProblem) else TikhonovProblem(g, psf)
    return _bisect_log_mu(prob.residual_norm, epsilon, increasing=True, criterion="discrepancy")


def select_mu_miller(energy, epsilon):
    if not energy > 0:
        raise DeblurError(f"Miller's rule needs a positive energy bound, got {energy}")
    return MuSelection("miller", (epsilon / energy) ** 2, 0, None, True)


def gcv_value(g, psf, mu):
    """GCV functional in its per-frequency form.

    ``V(mu) = sum(|g^| / (s^2 + mu))^2 / (sum 1 / (s^2 + mu))^2`` with
    ``s = |K^|``.  Multiplying numerator and denominator by mu^2 gives the
    usual residual-over-trace form, so both have the same minimizer.
    """
    if not mu > 0:
        raise DeblurError(f"mu must be positive, got {mu}")
    return TikhonovProblem(g, psf).gcv(mu)


def gcv_grid(lo=GCV_GRID_MIN, hi=GCV_GRID_MAX, points=GCV_GRID_POINTS):
    return np.logspace(math.log10(lo), math.log10(hi), points)


def select_mu_gcv(g, psf=None):
    """Minimize the GCV functional over mu.

    A log-spaced coarse grid localizes the basin (ties go to the smaller mu),
    then golden-section search on log(mu) between the grid neighbours of the
    best point shrinks the bracket to relative width `GCV_RTOL`.  A minimizer
    on the grid boundary is returned unrefined with ``converged=False``.
    """
    prob = g if isinstance(g, TikhonovProblem) else TikhonovProblem(g, psf)
    if not np.any(prob.data_abs):
        raise DeblurError("GCV is undefined for an all-zero observation")
    grid = gcv_grid()
    values = np.array([prob.gcv(mu) for mu in grid])
    evaluations = len(grid)
    i = int(np.argmin(values))
    if i == 0 or i == len(grid) - 1:
        return MuSelection("gcv", float(grid[i]), evaluations,
                           (float(grid[max(i - 1, 0)]), float(grid[min(i + 1, len(grid) - 1)])),
                           False)

    def v(t):
        return prob.gcv(math.exp(t))

    a, b = math.log(grid[i - 1]), math.log(grid[i + 1])
    best_t, best_v = math.log(grid[i]), float(values[i])
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    vc, vd = v(c), v(d)
    evaluations += 2
    while math.expm1(b - a) >= GCV_RTOL:
        if vc <= vd:
            b, d, vd = d, c, vc
            c = b - _INV_PHI * (b - a)
            vc = v(c)
        else:
            a, c, vc = c, d, vd
            d = a + _INV_PHI * (b - a)
            vd = v(d)
        evaluations += 1
    for t, val in ((c, vc), (d, vd)):
        if val < best_v:
            best_t, best_v = t, val
    bracket = (math.exp(min(a, best_t)), math.exp(max(b, best_t)))
    return MuSelection("gcv", math.exp(best_t), evaluations, bracket, True)
