import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deblur.cg import cg_deblur
from deblur.core import DeblurError, frobenius_norm
from deblur.direct import select_mu_gcv
from deblur.metrics import DeblurReport, relative_error
from deblur.simulate import disk_psf


def test_relative_error_basic_values(rng):
    f = rng.uniform(1, 255, (8, 8))
    assert relative_error(f, f) == 0.0
    assert relative_error(np.zeros_like(f), f) == 1.0
    assert relative_error(1.1 * f, f) == pytest.approx(0.1, abs=1e-12)


def test_relative_error_errors():
    with pytest.raises(DeblurError):
        relative_error(np.ones((2, 2)), np.zeros((2, 2)))
    with pytest.raises(DeblurError):
        relative_error(np.ones((2, 2)), np.ones((2, 3)))


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1), st.floats(1e-3, 1e3))
def test_relative_error_scale_invariance_and_triangle(seed, c):
    r = np.random.default_rng(seed)
    fr, ft = r.standard_normal((2, 6, 6))
    e = relative_error(fr, ft)
    assert relative_error(c * fr, c * ft) == pytest.approx(e, rel=1e-12)
    assert e <= (frobenius_norm(fr) + frobenius_norm(ft)) / frobenius_norm(ft) + 1e-12


def test_report_serializes_flat(small_instance):
    inst = small_instance
    sel = select_mu_gcv(inst.g, inst.psf)
    rep = DeblurReport("tikhonov", sel.mu, "gcv", 0.12, 3.4, 0.01, selection=sel)
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["parameter"] == sel.mu
    assert d["selection"]["criterion"] == "gcv"
    assert all(not isinstance(v, dict) for v in d["selection"].values())
    assert "wall_time" not in rep.to_dict(include_time=False)


def test_report_summarizes_trace(rng):
    g = rng.uniform(0, 255, (8, 8))
    _, trace = cg_deblur(g, disk_psf(8, 8, 1), 4)
    d = DeblurReport("cg", 4, "fixed", None, 1.0, 0.0, trace=trace).to_dict()
    assert d["iterations"] == 4 and d["stop_reason"] == "iterations"
    assert d["relative_error"] is None
