"""Regenerate the natural test images in tests/data from scikit-image's `camera`.

camera_512.pgm is the 512x512 8-bit original; camera_128.pgm is its 4x4
block mean, rounded to 8 bits.
"""
from pathlib import Path

import numpy as np
from skimage import data

from deblur.core import write_pgm

out = Path(__file__).resolve().parents[1] / "tests" / "data"
out.mkdir(parents=True, exist_ok=True)
cam = data.camera().astype(np.float64)
(out / "camera_512.pgm").write_bytes(write_pgm(cam))
(out / "camera_128.pgm").write_bytes(write_pgm(cam.reshape(128, 4, 128, 4).mean(axis=(1, 3))))
