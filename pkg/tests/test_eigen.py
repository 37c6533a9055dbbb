import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cyclelab.analysis.eigen import EigenTriple, characteristic_residual, cubic_roots, eigenvalues


def assert_triple(e, expected, tol=1e-8):
    assert len(e) == len(expected)
    for got, want in zip(e, expected):
        assert abs(got - want) <= tol, (e, expected)


def test_reference_jacobian():
    # det(J - lI) = -(1 + l)(l^2 + 1)
    e = eigenvalues([[0, 0, -0.5], [5, -1, 0], [2, 0, 0]])
    assert_triple(e, [1j, -1j, -1])


def test_diagonal():
    assert_triple(eigenvalues(np.diag([1.0, 2.0, 3.0])), [3, 2, 1], tol=1e-12)


def test_block():
    assert_triple(eigenvalues([[0, -1, 0], [1, 0, 0], [0, 0, -2]]), [1j, -1j, -2], tol=1e-12)


def test_two_by_two():
    e = eigenvalues([[0, -1], [1, 0]])
    assert e.third is None and e.padded()[2] is None
    assert_triple(e, [1j, -1j], tol=1e-15)
    assert_triple(eigenvalues([[2, 0], [0, -3]]), [2, -3], tol=1e-15)


def test_pair_helpers():
    e = eigenvalues([[0, 0, -0.5], [5, -1, 0], [2, 0, 0]])
    assert e.pair()[0].imag > 0 and e.pair()[1] == e.pair()[0].conjugate()
    assert e.others() == (complex(-1.0),)
    assert eigenvalues(np.diag([1.0, 2.0, 3.0])).pair() is None


@pytest.mark.parametrize("roots", [(1, 1, 1), (0, 0, 0), (2, 2, -1), (1e-3, -5, 7), (-4, 3 + 2j, 3 - 2j)])
def test_cubic_known_roots(roots):
    r1, r2, r3 = roots
    a = -(r1 + r2 + r3)
    b = r1 * r2 + r1 * r3 + r2 * r3
    c = -(r1 * r2 * r3)
    got = cubic_roots(a.real, b.real, c.real)
    for z in got:
        assert abs(((z + a) * z + b) * z + c) <= 1e-10


def test_random_matrices():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        J = rng.uniform(-5, 5, size=(3, 3))
        e = eigenvalues(J)
        scale = 1.0 + np.abs(J).max()
        assert max(characteristic_residual(J, z) for z in e) < 1e-8 * scale
        assert abs(sum(z.imag for z in e)) <= 1e-9
        tr, det = np.trace(J), np.linalg.det(J)
        assert abs(sum(e.values) - tr) <= 1e-8 * max(1.0, abs(tr))
        assert abs(np.prod(e.values) - det) <= 1e-8 * max(1.0, abs(det))
        reals = [z.real for z in e]
        assert reals == sorted(reals, reverse=True)


@given(arrays(np.float64, (3, 3), elements=st.floats(-5, 5, allow_subnormal=False)))
@settings(max_examples=300, derandomize=True)
def test_agrees_with_lapack(J):
    ours = np.sort_complex(np.array(eigenvalues(J).values))
    ref = np.sort_complex(np.linalg.eigvals(J))
    # repeated roots are only determined to ~sqrt(eps); compare via residual instead
    scale = 1.0 + np.abs(J).max()
    for z in ours:
        assert characteristic_residual(J, z) < 1e-8 * scale
    assert np.abs(np.sum(ours) - np.sum(ref)) <= 1e-8 * scale


def test_bad_shape():
    with pytest.raises(ValueError):
        eigenvalues(np.eye(4))
    with pytest.raises(ValueError):
        EigenTriple((1.0,))
