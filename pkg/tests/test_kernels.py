"""Backend equivalence: the compiled core and the NumPy fallback must
agree to floating-point noise on every kernel."""

import importlib

import numpy as np
import pytest

from sdec import _kernels
from sdec._kernels import _numpy_impl
from sdec.numeric import Rng


def _backends():
    impls = [("numpy", _numpy_impl)]
    try:
        core = importlib.import_module("sdec._kernels._core")
        impls.append(("compiled", core))
    except ImportError:
        pass
    return impls


BACKENDS = _backends()


@pytest.fixture(params=BACKENDS, ids=[name for name, _ in BACKENDS])
def impl(request):
    return request.param[1]


def test_selected_backend_is_available():
    assert _kernels.backend_name() in {name for name, _ in BACKENDS}


class TestAgainstReference:
    """Reference values computed with plain numpy expressions inline."""

    def test_selu(self, impl):
        x = Rng(1).gaussian_matrix(13, 7) * 3
        lam, alpha = _numpy_impl.SELU_LAMBDA, _numpy_impl.SELU_ALPHA
        expected = np.where(x > 0, lam * x, lam * alpha * np.expm1(x))
        assert np.allclose(impl.selu(x), expected, rtol=1e-13, atol=1e-13)

    def test_selu_grad(self, impl):
        x = Rng(2).gaussian_matrix(9, 5) * 3
        lam, alpha = _numpy_impl.SELU_LAMBDA, _numpy_impl.SELU_ALPHA
        expected = np.where(x > 0, lam, lam * alpha * np.exp(x))
        assert np.allclose(impl.selu_grad(x), expected, rtol=1e-13, atol=1e-13)

    def test_pairwise_sqdist(self, impl):
        rng = Rng(3)
        a = rng.gaussian_matrix(11, 6)
        b = rng.gaussian_matrix(4, 6)
        expected = np.array([[float(np.sum((ai - bj) ** 2)) for bj in b] for ai in a])
        assert np.allclose(impl.pairwise_sqdist(a, b), expected, rtol=1e-10, atol=1e-10)

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    def test_student_t_q(self, impl, alpha):
        rng = Rng(4)
        z = rng.gaussian_matrix(15, 3)
        mu = rng.gaussian_matrix(5, 3)
        d2 = np.array([[float(np.sum((zi - mj) ** 2)) for mj in mu] for zi in z])
        kernel = (1.0 + d2 / alpha) ** (-(alpha + 1.0) / 2.0)
        expected = kernel / kernel.sum(axis=1, keepdims=True)
        assert np.allclose(impl.student_t_q(z, mu, alpha), expected, rtol=1e-10, atol=1e-12)

    def test_nearest_centroid(self, impl):
        rng = Rng(5)
        x = rng.gaussian_matrix(30, 4)
        mu = rng.gaussian_matrix(6, 4)
        d2 = np.array([[float(np.sum((xi - mj) ** 2)) for mj in mu] for xi in x])
        labels, inertia = impl.nearest_centroid(x, mu)
        assert np.array_equal(labels, d2.argmin(axis=1))
        assert inertia == pytest.approx(float(d2.min(axis=1).sum()), rel=1e-12)

    def test_label_sums(self, impl):
        rng = Rng(6)
        x = rng.gaussian_matrix(25, 3)
        labels = np.array([i % 4 for i in range(25)], dtype=np.int64)
        sums, counts = impl.label_sums(x, labels, 5)
        for c in range(5):
            assert counts[c] == int(np.sum(labels == c))
            assert np.allclose(sums[c], x[labels == c].sum(axis=0) if counts[c] else 0.0,
                               rtol=1e-12, atol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
class TestCrossBackend:
    def test_backends_agree(self):
        numpy_impl = BACKENDS[0][1]
        core = BACKENDS[1][1]
        rng = Rng(7)
        z = rng.gaussian_matrix(40, 8)
        mu = rng.gaussian_matrix(6, 8)
        labels = np.array([i % 6 for i in range(40)], dtype=np.int64)
        assert np.allclose(numpy_impl.selu(z), core.selu(z), rtol=1e-13, atol=1e-13)
        assert np.allclose(numpy_impl.selu_grad(z), core.selu_grad(z), rtol=1e-13, atol=1e-13)
        assert np.allclose(numpy_impl.pairwise_sqdist(z, mu), core.pairwise_sqdist(z, mu),
                           rtol=1e-10, atol=1e-10)
        assert np.allclose(numpy_impl.student_t_q(z, mu, 1.0), core.student_t_q(z, mu, 1.0),
                           rtol=1e-11, atol=1e-13)
        l1, i1 = numpy_impl.nearest_centroid(z, mu)
        l2, i2 = core.nearest_centroid(z, mu)
        assert np.array_equal(l1, l2)
        assert i1 == pytest.approx(i2, rel=1e-12)
        s1, c1 = numpy_impl.label_sums(z, labels, 6)
        s2, c2 = core.label_sums(z, labels, 6)
        assert np.array_equal(c1, c2)
        assert np.allclose(s1, s2, rtol=1e-12, atol=1e-12)
