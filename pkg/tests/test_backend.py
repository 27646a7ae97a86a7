import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import bdsiw
from bdsiw import BivMaxParams, DsIW, DsW
from bdsiw._backend import MAX_DSIW, MIN_DSW, get_kernels

cy = pytest.importorskip("bdsiw._ckernels")
py = get_kernels("python")

unit = st.floats(0.01, 0.99)
shape = st.floats(0.1, 8.0)
points = st.lists(st.tuples(st.integers(0, 10**7), st.integers(0, 10**7)), min_size=1, max_size=30)


def test_active_backend_is_reported():
    assert bdsiw.BACKEND in ("cython", "python")


@pytest.mark.parametrize("name", ["python", "cython"])
def test_environment_variable_forces_backend(name):
    env = dict(os.environ, BDSIW_BACKEND=name)
    out = subprocess.run(
        [sys.executable, "-c", "import bdsiw; print(bdsiw.BACKEND)"], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == name


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_kernels("fortran")


@given(unit, unit, unit, shape, st.sampled_from([MAX_DSIW, MIN_DSW]), points)
def test_pair_kernels_agree(t1, t2, t3, z, model, pts):
    x1 = np.array([p[0] for p in pts], dtype=np.int64)
    x2 = np.array([p[1] for p in pts], dtype=np.int64)
    lt = np.log([t1, t2, t3])
    a = np.asarray(cy.pair_prob_array(x1, x2, *lt, z, model))
    b = np.asarray(py.pair_prob_array(x1, x2, *lt, z, model))
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)
    w = np.ones(x1.size)
    la = cy.pair_loglik(x1, x2, w, *lt, z, model)
    lb = py.pair_loglik(x1, x2, w, *lt, z, model)
    if np.isfinite(lb):
        assert la == pytest.approx(lb, rel=1e-12)
    else:
        assert la == lb == -np.inf


@given(unit, shape, st.lists(st.integers(0, 10**7), min_size=1, max_size=30))
def test_univariate_kernels_agree_with_families(t, z, xs):
    xs = np.array(sorted(set(xs)), dtype=np.int64)
    w = np.ones(xs.size)
    for fam, code in ((DsIW(t, z), MAX_DSIW), (DsW(t, z), MIN_DSW)):
        with np.errstate(divide="ignore"):
            expected = np.sum(np.log(fam.pmf(xs)))
        for k in (cy, py):
            got = k.uni_loglik(xs, w, np.log(t), z, code)
            if np.isfinite(expected):
                assert got == pytest.approx(expected, rel=1e-11)
            else:
                assert got == -np.inf


def test_weights_are_multiplicities():
    p = BivMaxParams(0.3, 0.5, 0.6, 1.2)
    x1 = np.array([0, 1, 4], dtype=np.int64)
    x2 = np.array([2, 1, 0], dtype=np.int64)
    w = np.array([3.0, 1.0, 2.0])
    single = np.log(np.asarray(cy.pair_prob_array(x1, x2, *p.log_thetas, p.zeta, MAX_DSIW)))
    for k in (cy, py):
        assert k.pair_loglik(x1, x2, w, *p.log_thetas, p.zeta, MAX_DSIW) == pytest.approx(np.dot(w, single))
