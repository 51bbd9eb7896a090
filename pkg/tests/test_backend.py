import json
import os
import subprocess
import sys

import numpy as np
import pytest

from conftest import random_siegel
from ppav import _theta_py
from ppav.siegel import SiegelPoint
from ppav.theta import BACKEND, Characteristic, theta_eval

kernel = pytest.importorskip("ppav._theta_kernel")


def _inputs(rng, g, R=3.0):
    Z = random_siegel(rng, g)
    w = rng.normal(size=g) + 0.3j * rng.normal(size=g)
    u = rng.choice([0.0, 0.5], size=g)
    c = rng.normal(scale=0.3, size=g)
    lo = np.ceil(c - u - R).astype(np.int_)
    hi = np.floor(c - u + R).astype(np.int_)
    return (np.ascontiguousarray(Z.real), np.ascontiguousarray(Z.imag), w.real.copy(), w.imag.copy(), u, c, R, lo, hi)


def test_backend_selection():
    expected = "python" if os.environ.get("PPAV_PURE_PYTHON") == "1" else "cython"
    assert BACKEND == expected


def test_kernels_agree_termwise(rng):
    for g in (1, 2, 3, 4):
        args = _inputs(rng, g)
        a = kernel.theta_terms(*args)
        b = _theta_py.theta_terms(*args)
        assert a.shape == b.shape
        assert np.allclose(a, b, rtol=1e-13, atol=1e-300)


def test_forced_python_backend_matches():
    Z = [[1 + 1j, 0.2], [0.2, 0.8 + 1.2j]]
    code = (
        "import json; from ppav.theta import BACKEND, theta_eval, Characteristic; from ppav.siegel import SiegelPoint;"
        f"v = theta_eval(SiegelPoint({Z!r}), Characteristic.parse('1/2,0:0,0'), [0.1, 0.2j]);"
        "print(json.dumps([BACKEND, v.real, v.imag]))"
    )
    env = dict(os.environ, PPAV_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, re, im = json.loads(out.stdout)
    assert backend == "python"
    here = theta_eval(SiegelPoint(Z), Characteristic.parse("1/2,0:0,0"), [0.1, 0.2j])
    assert abs(complex(re, im) - here) <= 1e-14 * max(1.0, abs(here))
