import numpy as np
import pytest

from steinlab.dictionaries import (DICT_VERSION, lipschitz_dictionary,
                                   scalar_dictionary, vector_dictionary)
from steinlab.functions import (Character, Constant, Coordinate, HermiteProduct,
                                SmoothBump, UserCallback, fd_gradient)


@pytest.mark.parametrize("f", [
    Character(np.array([0.7, -1.2])),
    HermiteProduct((2, 1)),
    SmoothBump(np.array([0.3, -0.2]), 1.4),
    Coordinate(1),
    Constant(2.5),
])
def test_analytic_gradients_match_finite_differences(f):
    rng = np.random.default_rng(0)
    x = rng.uniform(-1.5, 1.5, (40, 2))
    g = f.grad(x)
    fd = fd_gradient(f, x)
    assert np.max(np.abs(g - fd)) < 1e-6


def test_bump_compact_support_and_range():
    b = SmoothBump(np.zeros(2), 1.0)
    far = np.array([[1.5, 0.0], [0.0, -2.0]])
    assert np.all(b(far) == 0)
    assert np.all(b.grad(far) == 0)
    assert b(np.zeros((1, 2)))[0] == pytest.approx(1.0)
    edge = np.array([[0.999999, 0.0]])
    assert b(edge)[0] < 1e-6  # C-infinity decay at the boundary


def test_user_callback_requires_gradient():
    f = UserCallback(lambda x: x[:, 0] ** 2)
    assert not f.has_gradient
    with pytest.raises(ValueError):
        f.grad(np.zeros((1, 1)))


def test_dictionary_sizes():
    assert DICT_VERSION == "v1"
    assert len(scalar_dictionary(2)) == 20
    assert len(scalar_dictionary(1)) == 20
    assert len(lipschitz_dictionary(2)) == 20
    assert len(vector_dictionary(2)) == 12


@pytest.mark.parametrize("d", [1, 2, 3])
def test_scalar_dictionary_gradients(d):
    rng = np.random.default_rng(1)
    x = rng.uniform(-1.2, 1.2, (25, d))
    h = 1e-6
    for fn in scalar_dictionary(d):
        g = fn.grad(x)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            fd = (fn(x + e) - fn(x - e)) / (2 * h)
            assert np.max(np.abs(g[:, j] - fd)) < 5e-5, fn.name


@pytest.mark.parametrize("d", [1, 2, 4])
def test_lipschitz_dictionary_certificates(d):
    rng = np.random.default_rng(2)
    x = rng.uniform(-4, 4, (4000, d))
    for fn in lipschitz_dictionary(d):
        assert fn.lip == 1.0
        gn = np.linalg.norm(fn.grad(x), axis=1)
        assert gn.max() <= 1.0 + 1e-9, fn.name
        # sampled difference quotients respect the certificate
        y = x + rng.uniform(-0.5, 0.5, x.shape)
        dq = np.abs(fn(x) - fn(y)) / np.maximum(np.linalg.norm(x - y, axis=1), 1e-12)
        assert dq.max() <= 1.0 + 1e-9, fn.name


def test_lipschitz_hessian_certificates_by_fd():
    d = 2
    rng = np.random.default_rng(3)
    x = rng.uniform(-3, 3, (300, d))
    h = 1e-4
    for fn in lipschitz_dictionary(d):
        if fn.hess_op is None:
            continue
        H = np.zeros((len(x), d, d))
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            H[:, :, j] = (fn.grad(x + e) - fn.grad(x - e)) / (2 * h)
        op = np.linalg.norm(H, ord=2, axis=(1, 2))
        assert op.max() <= fn.hess_op + 1e-3, fn.name


@pytest.mark.parametrize("d", [1, 2, 3])
def test_vector_dictionary_jacobians(d):
    rng = np.random.default_rng(4)
    x = rng.uniform(-1.5, 1.5, (20, d))
    h = 1e-6
    for fn in vector_dictionary(d):
        J = fn.jac(x)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            fd = (fn(x + e) - fn(x - e)) / (2 * h)
            assert np.max(np.abs(J[:, :, j] - fd)) < 5e-4, fn.name
