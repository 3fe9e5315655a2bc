from pathlib import Path

import numpy as np
import pytest

from deblur.core import frobenius_norm, load_image
from deblur.simulate import add_gaussian_noise, blur, disk_psf

DATA = Path(__file__).parent / "data"

_criteria = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20160506)


@pytest.fixture(scope="session")
def camera_128():
    return load_image(DATA / "camera_128.pgm")


@pytest.fixture(scope="session")
def camera_512():
    return load_image(DATA / "camera_512.pgm")


class Instance:
    """A simulated degradation with its ground-truth bookkeeping."""

    def __init__(self, truth, radius, snr_db, seed):
        self.truth = truth
        self.psf = disk_psf(*truth.shape, radius)
        self.blurred = blur(truth, self.psf)
        self.g, self.noise = add_gaussian_noise(self.blurred, snr_db, seed)
        self.energy = frobenius_norm(truth)
        self.epsilon = self.noise.realized_norm


@pytest.fixture(scope="session")
def small_instance(camera_128):
    # 128x128 natural image, radius 5, 40 dB, seed 0
    return Instance(camera_128, 5, 40.0, 0)


def well_conditioned_psf(rows, cols):
    """0.8 * delta + 0.2 * (radius-1 disk); |OTF| >= 0.8 - 0.2 * 3/5 = 0.68."""
    kernel = 0.2 * disk_psf(rows, cols, 1).image
    kernel[0, 0] += 0.8
    return kernel


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True})
    if call.excinfo is not None:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {entry['title']}")
