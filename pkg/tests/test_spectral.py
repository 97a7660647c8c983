import numpy as np
import pytest

from cstar_mixing import (
    AlgebraShape,
    DefectivePeripheral,
    cesaro_projector_iterative,
    cesaro_projector_spectral,
    from_stochastic,
    from_superoperator,
    identity_channel,
    power_limit,
    random_unital_cp,
    range_of_defect,
    spectrum,
)


def shift4():
    P = np.zeros((4, 4))
    for j in range(4):
        P[j, (j + 1) % 4] = 1.0
    return from_stochastic(P)


def chain2():
    return from_stochastic(np.array([[0.7, 0.3], [0.4, 0.6]]))


def defective3():
    # unital and real, but (M - I) has rank 1 while 1 has algebraic
    # multiplicity 3: a genuine peripheral Jordan block
    M = np.array([[1.0, 0.0, 0.0], [1.0, 1.0, -1.0], [0.0, 0.0, 1.0]])
    return from_superoperator(AlgebraShape([1, 1, 1]), M)


def test_shift_spectrum_is_fourth_roots():
    s = spectrum(shift4())
    roots = [np.exp(2j * np.pi * k / 4) for k in range(4)]
    eigs = np.array(s.eigenvalues)
    assert eigs.shape == (4,)
    assert max(min(abs(eigs - r)) for r in roots) <= 1e-10
    assert s.fixed_space_dim == 1
    assert s.spectral_radius == pytest.approx(1.0, abs=1e-12)
    assert len(s.peripheral) == 4
    assert not s.defective_peripheral


def test_shift_cesaro_is_uniform_average():
    # all four roots of unity average out except the 1-eigenspace
    c = cesaro_projector_spectral(shift4())
    assert np.allclose(c, np.full((4, 4), 0.25), atol=1e-12)


def test_shift_powers_diverge():
    pl = power_limit(shift4())
    assert pl.diverges_peripheral
    assert pl.limit is None
    assert len(pl.offending) == 3
    assert all(abs(abs(c) - 1.0) <= 1e-10 for c in pl.offending)


def test_chain_eigenvalues():
    s = spectrum(chain2())
    got = sorted(x.real for x in s.eigenvalues)
    assert got == pytest.approx([0.3, 1.0], abs=1e-12)
    assert max(abs(x.imag) for x in s.eigenvalues) <= 1e-12
    assert s.fixed_space_dim == 1


def test_chain_cesaro_matches_long_power():
    op = chain2()
    c = cesaro_projector_spectral(op)
    target = np.linalg.matrix_power(op.matrix.real, 200)
    assert np.allclose(c, target, atol=1e-12)
    # rank-one projection onto constants along (4/7, 3/7)
    expected = np.outer(np.ones(2), [4 / 7, 3 / 7])
    assert np.allclose(c, expected, atol=1e-12)


def test_chain_power_limit_converges():
    pl = power_limit(chain2())
    assert not pl.diverges_peripheral
    assert pl.offending == ()
    assert np.allclose(pl.limit, np.outer(np.ones(2), [4 / 7, 3 / 7]),
                       atol=1e-12)


def test_identity_spectrum():
    op = identity_channel(AlgebraShape([2]))
    s = spectrum(op)
    assert s.fixed_space_dim == 4
    assert s.peripheral == (1 + 0j,)
    assert not s.defective_peripheral
    assert np.allclose(s.cesaro_matrix, np.eye(4), atol=1e-14)
    assert range_of_defect(op).shape == (4, 0)


def test_defective_peripheral_detected():
    s = spectrum(defective3())
    assert s.defective_peripheral
    assert s.cesaro_matrix is None


def test_defective_peripheral_raises():
    op = defective3()
    with pytest.raises(DefectivePeripheral):
        cesaro_projector_spectral(op)
    with pytest.raises(DefectivePeripheral):
        power_limit(op)


def test_range_of_defect_width_and_span():
    op = shift4()
    basis = range_of_defect(op)
    assert basis.shape == (4, 3)
    assert np.allclose(basis.conj().T @ basis, np.eye(3), atol=1e-12)
    # every (T - id) v lies in the returned column space
    rng = np.random.default_rng(3)
    m = op.matrix - np.eye(4)
    for _ in range(5):
        v = m @ (rng.normal(size=4) + 1j * rng.normal(size=4))
        resid = v - basis @ (basis.conj().T @ v)
        assert np.linalg.norm(resid) <= 1e-10


def test_cesaro_projector_is_projector():
    for seed in (0, 1):
        op = random_unital_cp(AlgebraShape([2, 1]), 3, seed=seed)
        c = cesaro_projector_spectral(op)
        assert np.allclose(c @ c, c, atol=1e-9)
        assert np.allclose(c @ op.matrix, c, atol=1e-9)
        assert np.allclose(op.matrix @ c, c, atol=1e-9)


def test_iterative_matches_spectral():
    shapes = [AlgebraShape([2]), AlgebraShape([1, 2]), AlgebraShape([3])]
    for i, shape in enumerate(shapes):
        op = random_unital_cp(shape, 2 + i % 2, seed=100 + i)
        exact = cesaro_projector_spectral(op)
        # the dyadic residual decays like 1/N; the extrapolate is far tighter
        it = cesaro_projector_iterative(op, 2 ** 14, tol=1e-3)
        assert it.converged
        assert np.max(np.abs(it.matrix - exact)) <= 1e-6


def test_iterative_plain_accumulation_oracle():
    op = chain2()
    n = 100
    acc = np.zeros((2, 2), dtype=complex)
    cur = np.eye(2, dtype=complex)
    for _ in range(n):
        acc += cur
        cur = op.matrix @ cur
    it = cesaro_projector_iterative(op, n, tol=1e-3)
    assert np.allclose(it.raw_mean, acc / n, atol=1e-12)


def test_iterative_dyadic_doubling_matches_direct_sum():
    op = random_unital_cp(AlgebraShape([2]), 2, seed=9)
    n = 64
    acc = np.zeros((4, 4), dtype=complex)
    cur = np.eye(4, dtype=complex)
    for _ in range(n):
        acc += cur
        cur = op.matrix @ cur
    it = cesaro_projector_iterative(op, n, tol=1e-3)
    assert np.allclose(it.raw_mean, acc / n, atol=1e-11)


def test_iterative_edge_cases():
    op = chain2()
    it = cesaro_projector_iterative(op, 1, tol=1e-6)
    assert np.array_equal(it.raw_mean, np.eye(2))
    assert not it.converged
    with pytest.raises(ValueError):
        cesaro_projector_iterative(op, 0, tol=1e-6)


def test_near_degenerate_eigenvalues_cluster():
    # triangular stochastic matrix with eigenvalues 1, 0.5, 0.5 - 1e-9;
    # the near pair sits inside one clustering radius
    P = np.array([[1.0, 0.0, 0.0],
                  [0.5, 0.5, 0.0],
                  [0.0, 0.5 + 1e-9, 0.5 - 1e-9]])
    s = spectrum(from_stochastic(P))
    mults = sorted(k for _, k in s.clusters)
    assert mults == [1, 2]
    assert not s.defective_peripheral
