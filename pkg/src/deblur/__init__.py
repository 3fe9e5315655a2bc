"""Out-of-focus blur simulation and non-blind de-blurring in the Fourier domain."""
from .cg import CgRecord, CgTrace, cg_deblur
from .core import (
    DeblurError,
    frobenius_norm,
    load_image,
    read_pgm,
    read_raw,
    save_image,
    write_pgm,
    write_raw,
)
from .direct import (
    MuSelection,
    TikhonovProblem,
    gcv_value,
    pseudo_inverse_deblur,
    select_mu_discrepancy,
    select_mu_energy,
    select_mu_gcv,
    select_mu_miller,
    tikhonov_deblur,
    tikhonov_norms,
)
from .fourier import circular_convolve, circular_shift, dft2, idft2, spectral_norm
from .metrics import DeblurReport, relative_error
from .simulate import NoiseRealization, Psf, add_gaussian_noise, blur, disk_psf

__version__ = "0.1.0"
