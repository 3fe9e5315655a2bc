"""Image values, norms and file formats.

Images are plain 2-D ``float64`` numpy arrays.  Two on-disk formats are
supported: binary PGM (``P5``, 8-bit) for anything a human should look at,
and ``RAWF64`` for lossless float intermediates::

    RAWF64 <rows> <cols>\\n<rows*cols little-endian float64, row-major>
"""
import re

import numpy as np

__all__ = [
    "DeblurError",
    "PgmError",
    "PgmHeaderError",
    "PgmTruncatedError",
    "PgmMaxvalError",
    "RawFormatError",
    "RawMagicError",
    "RawSizeError",
    "as_image",
    "frobenius_norm",
    "read_pgm",
    "write_pgm",
    "read_raw",
    "write_raw",
    "load_image",
    "save_image",
]


class DeblurError(ValueError):
    """Base class for all errors raised by this package."""


class PgmError(DeblurError):
    pass


class PgmHeaderError(PgmError):
    pass


class PgmTruncatedError(PgmError):
    pass


class PgmMaxvalError(PgmError):
    pass


class RawFormatError(DeblurError):
    pass


class RawMagicError(RawFormatError):
    pass


class RawSizeError(RawFormatError):
    pass


def as_image(x, name="image"):
    """Return `x` as a finite 2-D float64 array (copying only if needed)."""
    img = np.asarray(x, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise DeblurError(f"{name} must be a non-empty 2-D array, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise DeblurError(f"{name} contains NaN or Inf samples")
    return img


def check_same_shape(a, b, what="inputs"):
    if a.shape != b.shape:
        raise DeblurError(f"dimension mismatch between {what}: {a.shape} vs {b.shape}")


def frobenius_norm(img):
    """sqrt of the sum of squared samples, scaled to avoid under/overflow."""
    x = np.asarray(img, dtype=np.float64)
    peak = float(np.max(np.abs(x))) if x.size else 0.0
    if peak == 0.0:
        return 0.0
    return peak * float(np.sqrt(np.sum(np.square(x / peak))))


# PGM ------------------------------------------------------------------------

_PGM_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pgm(data):
    """Decode a binary 8-bit PGM.

    Comments in the header are accepted.  Samples are returned as their integer
    values in float64, without any rescaling to ``maxval``.
    """
    data = bytes(data)
    pos = 0
    tokens = []
    for _ in range(4):
        m = _PGM_TOKEN.match(data, pos)
        if m is None:
            raise PgmHeaderError("incomplete PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic, width, height, maxval = tokens
    if magic != b"P5":
        raise PgmHeaderError(f"not a binary PGM (magic {magic!r})")
    try:
        cols, rows, maxval = int(width), int(height), int(maxval)
    except ValueError:
        raise PgmHeaderError("non-numeric PGM header field") from None
    if cols < 1 or rows < 1:
        raise PgmHeaderError(f"invalid PGM dimensions {cols}x{rows}")
    if not 1 <= maxval <= 255:
        raise PgmMaxvalError(f"unsupported maxval {maxval} (only 8-bit PGM is supported)")
    # exactly one whitespace byte separates maxval from the raster
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PgmHeaderError("missing whitespace after maxval")
    pos += 1
    n = rows * cols
    raster = data[pos:pos + n]
    if len(raster) < n:
        raise PgmTruncatedError(f"expected {n} data bytes, found {len(raster)}")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(rows, cols)
    return img.astype(np.float64)


def write_pgm(img):
    """Encode an image as an 8-bit binary PGM.

    Samples are clamped to [0, 255] and rounded half away from zero.
    """
    img = as_image(img)
    clamped = np.clip(img, 0.0, 255.0)
    q = np.floor(clamped + 0.5).astype(np.uint8)
    rows, cols = img.shape
    return f"P5\n{cols} {rows}\n255\n".encode("ascii") + q.tobytes()


# RAWF64 ---------------------------------------------------------------------

_RAW_HEADER = re.compile(rb"RAWF64 (\d+) (\d+)\n")


def write_raw(img):
    img = as_image(img)
    rows, cols = img.shape
    header = f"RAWF64 {rows} {cols}\n".encode("ascii")
    return header + np.ascontiguousarray(img, dtype="<f8").tobytes()


def read_raw(data):
    data = bytes(data)
    m = _RAW_HEADER.match(data)
    if m is None:
        raise RawMagicError("missing or malformed RAWF64 header")
    rows, cols = int(m.group(1)), int(m.group(2))
    body = data[m.end():]
    if rows < 1 or cols < 1 or len(body) != 8 * rows * cols:
        raise RawSizeError(
            f"header declares {rows}x{cols} ({8 * rows * cols} bytes), body has {len(body)}")
    return np.frombuffer(body, dtype="<f8").reshape(rows, cols).astype(np.float64)


def load_image(path):
    """Read a ``.raw`` (RAWF64) or PGM file, chosen by extension."""
    with open(path, "rb") as fh:
        data = fh.read()
    if str(path).lower().endswith(".raw"):
        return read_raw(data)
    return read_pgm(data)


def save_image(path, img):
    payload = write_raw(img) if str(path).lower().endswith(".raw") else write_pgm(img)
    with open(path, "wb") as fh:
        fh.write(payload)
