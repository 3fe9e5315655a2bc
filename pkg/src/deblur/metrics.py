"""Restoration quality and run reports."""
from dataclasses import asdict, dataclass

from .cg import CgTrace
from .core import DeblurError, as_image, check_same_shape, frobenius_norm
from .direct import MuSelection

__all__ = ["DeblurReport", "relative_error"]


def relative_error(f_restored, f_true):
    """``||f_restored - f_true|| / ||f_true||`` in the Frobenius norm."""
    f_restored = as_image(f_restored, "restored image")
    f_true = as_image(f_true, "true image")
    check_same_shape(f_restored, f_true, "restored and true images")
    ref = frobenius_norm(f_true)
    if ref == 0.0:
        raise DeblurError("relative error is undefined for an all-zero true image")
    return frobenius_norm(f_restored - f_true) / ref


@dataclass
class DeblurReport:
    method: str                 # "pseudo-inverse" | "tikhonov" | "cg"
    parameter: float            # mu, k, or the inverse-filter tolerance
    criterion: str              # how the parameter was chosen
    relative_error: float | None
    residual_norm: float
    wall_time: float
    selection: MuSelection | None = None
    trace: CgTrace | None = None

    def to_dict(self, include_time=True):
        """Flat JSON-ready dict; the selection nests one level, the trace is summarized."""
        out = {
            "method": self.method,
            "parameter": self.parameter,
            "criterion": self.criterion,
            "relative_error": self.relative_error,
            "residual_norm": self.residual_norm,
        }
        if include_time:
            out["wall_time"] = self.wall_time
        if self.selection is not None:
            sel = asdict(self.selection)
            if sel["bracket"] is not None:
                sel["bracket"] = list(sel["bracket"])
            out["selection"] = sel
        if self.trace is not None:
            out["iterations"] = self.trace.iterations
            out["stop_reason"] = self.trace.stop_reason
        return out
