import json
import os
import subprocess
import sys

import numpy as np
import pytest

from isocond import _accel, kernels, trivial_set
from isocond.conditioning import projection_sums
from isocond.kinematics import Manipulator, Posture, jacobian

from conftest import random_arm

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def reference_sums(links, k, thetas):
    m = Manipulator(tuple(links))
    out = [projection_sums(jacobian(m, Posture(tuple(th))), k) for th in thetas]
    return tuple(np.array(col) for col in zip(*out))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_numpy_batch_matches_jacobian(n):
    rng = np.random.default_rng(n)
    links = rng.uniform(0.3, 2, n)
    k = trivial_set(max(n, 3)).points[:n] if n >= 3 else np.array([[1.4, 0], [-1.4, 0]])
    th = rng.uniform(-7, 7, (50, n))
    for got, want in zip(kernels.batch_sums(links, k, th, use_numba=False), reference_sums(links, k, th)):
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


@needs_numba
@pytest.mark.parametrize("seed", range(5))
def test_batch_parity(seed):
    rng = np.random.default_rng(seed)
    m = random_arm(rng, n=int(rng.integers(3, 7)))
    k = trivial_set(m.n, 0.3).points
    th = rng.uniform(-7, 7, (1000, m.n))
    a = kernels.batch_z(m.as_array(), k, th, use_numba=True)
    b = kernels.batch_z(m.as_array(), k, th, use_numba=False)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


@needs_numba
@pytest.mark.parametrize("n,d", [(3, 2), (4, 3), (4, 2), (5, 2)])
def test_lattice_parity(n, d):
    rng = np.random.default_rng(n * 10 + d)
    links = rng.uniform(0.5, 1.5, n)
    k = trivial_set(n).points
    axis = 2 * np.pi * np.arange(24) / 24
    suffix = rng.uniform(0, 6, n - 1 - d)
    a = kernels.lattice_z(links, k, 0.4, axis, d, suffix, use_numba=True)
    b = kernels.lattice_z(links, k, 0.4, axis, d, suffix, use_numba=False)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


def test_lattice_order_is_c_order():
    links = np.array([1.0, 0.7, 1.2])
    k = trivial_set(3).points
    axis = np.linspace(0, 6, 7)
    z = kernels.lattice_z(links, k, 0.2, axis, 2).reshape(7, 7)
    th = np.array([[0.2, a, b] for a in axis for b in axis])
    np.testing.assert_allclose(z.ravel(), kernels.batch_z(links, k, th, use_numba=False), atol=1e-13)


def test_lattice_dimension_mismatch():
    with pytest.raises(ValueError):
        kernels.lattice_sums(np.ones(4), trivial_set(4).points, 0.0, np.arange(4.0), 2)


def test_bad_model_shape():
    with pytest.raises(ValueError):
        kernels.batch_sums(np.ones(3), trivial_set(4).points, np.zeros((1, 3)))


def test_env_flag_selects_numpy():
    code = (
        "import json, numpy as np\n"
        "from isocond import _accel, kernels, trivial_set\n"
        "z = kernels.batch_z(np.ones(3), trivial_set(3).points, np.array([[0.0, 2.0, 2.5]]))\n"
        "print(json.dumps([_accel.USE_NUMBA, float(z[0])]))\n"
    )
    env = dict(os.environ, ISOCOND_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    use, z = json.loads(out.stdout)
    assert use is False
    ref = kernels.batch_z(np.ones(3), trivial_set(3).points, np.array([[0.0, 2.0, 2.5]]), use_numba=False)
    assert z == pytest.approx(float(ref[0]), abs=1e-15)
