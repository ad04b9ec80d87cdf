import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_matrix
from iontrap_parity import (
    build_space,
    correlation_operator,
    fock_state,
    identity,
    ladder,
    observable,
    pauli,
    restrict,
    sector_basis,
    su2_coherent,
)
from iontrap_parity.exceptions import NotHermitianError, TruncationError
from iontrap_parity.hilbert import OBSERVABLE_KINDS, Operator, acts_trivially_on_qubit, commutator
from iontrap_parity.measurement import expectation


def delta(a, b):
    return 1.0 if a == b else 0.0


@pytest.mark.parametrize("cut, dim", [((0, 0), 2), ((1, 1), 8), ((20, 20), 882), ((3, 1), 16)])
def test_build_space_dimension(cut, dim):
    assert build_space(*cut).dim == dim


def test_index_formula_is_a_bijection():
    space = build_space(3, 2)
    seen = set()
    for nx in range(4):
        for ny in range(3):
            for s in (0, 1):
                i = space.index(nx, ny, s)
                assert i == ((nx * 3) + ny) * 2 + s
                assert space.labels(i) == (nx, ny, s)
                seen.add(i)
    assert seen == set(range(space.dim))
    assert np.array_equal(space.occupations[7], space.labels(7))


def test_negative_cutoff_rejected():
    with pytest.raises(ValueError):
        build_space(-1, 2)


def test_ladder_matches_brute_force(small_space):
    sp = small_space
    ax = brute_force_matrix(
        sp, lambda b, k: np.sqrt(k[0]) * delta(b, (k[0] - 1, k[1], k[2]))
    )
    ay = brute_force_matrix(
        sp, lambda b, k: np.sqrt(k[1]) * delta(b, (k[0], k[1] - 1, k[2]))
    )
    np.testing.assert_allclose(ladder(sp, "x").matrix, ax, atol=0)
    np.testing.assert_allclose(ladder(sp, "y").matrix, ay, atol=0)
    np.testing.assert_allclose(ladder(sp, "x", "raise").matrix, ax.T, atol=0)
    assert not ladder(sp, "x").hermitian


def test_ladder_examples():
    sp = build_space(3, 0)
    a = ladder(sp, "x")
    np.testing.assert_allclose(a.apply(fock_state(sp, 1, 0).amplitudes), fock_state(sp, 0, 0).amplitudes)
    np.testing.assert_allclose(a.apply(fock_state(sp, 0, 0).amplitudes), 0)
    np.testing.assert_allclose(
        a.apply(fock_state(sp, 3, 0).amplitudes), np.sqrt(3) * fock_state(sp, 2, 0).amplitudes
    )


def test_ladder_bad_arguments(small_space):
    with pytest.raises(ValueError):
        ladder(small_space, "z")
    with pytest.raises(ValueError):
        ladder(small_space, "x", "sideways")


def test_canonical_commutator_on_interior():
    sp = build_space(4, 3)
    for mode, n_max, col in (("x", 4, 0), ("y", 3, 1)):
        a = ladder(sp, mode).matrix
        comm = a @ a.T - a.T @ a
        interior = sp.occupations[:, col] < n_max
        block = comm[np.ix_(interior, interior)]
        np.testing.assert_allclose(block, np.eye(interior.sum()), atol=1e-12)


def test_pauli_examples():
    sp = build_space(1, 1)
    sz, sx, sy = pauli(sp, "z"), pauli(sp, "x"), pauli(sp, "y")
    for nx in range(2):
        for ny in range(2):
            up = fock_state(sp, nx, ny, "excited").amplitudes
            np.testing.assert_allclose(sz.apply(up), up)
    np.testing.assert_allclose(sx.apply(fock_state(sp, 0, 0, 0).amplitudes),
                               fock_state(sp, 0, 0, 1).amplitudes)
    np.testing.assert_allclose(sy.apply(fock_state(sp, 0, 0, 0).amplitudes),
                               -1j * fock_state(sp, 0, 0, 1).amplitudes)


def test_pauli_algebra():
    sp = build_space(2, 1)
    sx, sy, sz = (pauli(sp, a).matrix for a in "xyz")
    eye = np.eye(sp.dim)
    for m in (sx, sy, sz):
        np.testing.assert_allclose(m @ m, eye, atol=1e-12)
    np.testing.assert_allclose(sx @ sy, 1j * sz, atol=1e-12)
    with pytest.raises(ValueError):
        pauli(sp, "w")


def test_correlation_matches_brute_force(small_space):
    sp = small_space

    def element(b, k):
        nx, ny, s = k
        # a_x^dag a_y |nx, ny> + a_x a_y^dag |nx, ny>
        return (np.sqrt((nx + 1) * ny) * delta(b, (nx + 1, ny - 1, s))
                + np.sqrt(nx * (ny + 1)) * delta(b, (nx - 1, ny + 1, s)))

    np.testing.assert_allclose(correlation_operator(sp).matrix, brute_force_matrix(sp, element),
                               atol=1e-15)


def test_correlation_examples():
    sp = build_space(2, 2)
    C = correlation_operator(sp)
    for s in (0, 1):
        np.testing.assert_allclose(C.apply(fock_state(sp, 1, 0, s).amplitudes),
                                   fock_state(sp, 0, 1, s).amplitudes)
        expected = np.sqrt(2) * (fock_state(sp, 2, 0, s).amplitudes + fock_state(sp, 0, 2, s).amplitudes)
        np.testing.assert_allclose(C.apply(fock_state(sp, 1, 1, s).amplitudes), expected)


def test_correlation_commutes_with_number_and_qubit():
    sp = build_space(4, 4)
    C = correlation_operator(sp)
    assert np.linalg.norm(commutator(C, observable(sp, "total_number"))) < 1e-12
    for axis in "xyz":
        assert np.linalg.norm(commutator(C, pauli(sp, axis))) < 1e-12
    assert acts_trivially_on_qubit(C)
    assert not acts_trivially_on_qubit(pauli(sp, "x"))


def test_sector_two_spectrum_oracle():
    # hand-written block on (|0,2>, |1,1>, |2,0>)
    r2 = np.sqrt(2)
    block = np.array([[0, r2, 0], [r2, 0, r2], [0, r2, 0]])
    oracle = np.linalg.eigvalsh(block)
    np.testing.assert_allclose(oracle, [-2, 0, 2], atol=1e-12)
    sp = build_space(2, 2)
    got = restrict(correlation_operator(sp), sector_basis(sp, 2))
    np.testing.assert_allclose(got, block, atol=1e-15)


@pytest.mark.parametrize("N", [0, 1, 2, 5, 12, 30])
def test_sector_spectra_are_equally_spaced(N):
    sp = build_space(N, N)
    idx = sector_basis(sp, N)
    expected = N - 2.0 * np.arange(N + 1)[::-1]
    for kind in ("correlation", "angular_momentum_z"):
        w = np.linalg.eigvalsh(restrict(observable(sp, kind), idx))
        np.testing.assert_allclose(w, expected, atol=1e-9)


def test_sector_basis_examples():
    assert len(sector_basis(build_space(3, 3), 0)) == 1
    sp = build_space(2, 2)
    assert [sp.labels(i)[:2] for i in sector_basis(sp, 2)] == [(0, 2), (1, 1), (2, 0)]
    assert [sp.labels(i)[2] for i in sector_basis(sp, 3, "excited")] == [1, 1]
    with pytest.raises(TruncationError):
        sector_basis(sp, 5)
    with pytest.raises(TruncationError):
        sector_basis(sp, -1)


def test_restrict_examples():
    sp = build_space(2, 2)
    np.testing.assert_array_equal(restrict(identity(sp), [0, 5, 9]), np.eye(3))
    np.testing.assert_allclose(restrict(correlation_operator(sp), sector_basis(sp, 1)),
                               [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        restrict(identity(sp), [1, 1])
    with pytest.raises(IndexError):
        restrict(identity(sp), [0, sp.dim])


def test_observable_examples():
    sp = build_space(3, 3)
    vac = fock_state(sp, 0, 0)
    q = observable(sp, "quadrature_position", "x")
    assert np.vdot(vac.amplitudes, q.matrix @ q.matrix @ vac.amplitudes).real == pytest.approx(0.5)
    p = observable(sp, "quadrature_momentum", "y")
    assert np.vdot(vac.amplitudes, p.matrix @ p.matrix @ vac.amplitudes).real == pytest.approx(0.5)
    assert expectation(su2_coherent(build_space(2, 2), 2),
                       observable(build_space(2, 2), "correlation_squared")) == pytest.approx(4)
    assert expectation(fock_state(sp, 2, 1), observable(sp, "number", "x")) == pytest.approx(2)
    with pytest.raises(ValueError):
        observable(sp, "number")
    with pytest.raises(ValueError):
        observable(sp, "spin")


@pytest.mark.parametrize("kind", OBSERVABLE_KINDS)
def test_observables_hermitian_and_qubit_trivial(kind):
    sp = build_space(3, 2)
    op = observable(sp, kind, "x")
    assert np.max(np.abs(op.matrix - op.matrix.conj().T)) <= 1e-12
    assert op.hermitian
    assert acts_trivially_on_qubit(op)


def test_operator_rejects_non_hermitian_when_required():
    sp = build_space(1, 0)
    m = np.zeros((sp.dim, sp.dim))
    m[0, 1] = 1.0
    with pytest.raises(NotHermitianError):
        Operator(sp, m, "bad", hermitian=True)
    assert Operator(sp, m).hermitian is False


def test_scaling_carries_spectrum():
    sp = build_space(3, 3)
    C = correlation_operator(sp)
    w, _ = C.spectrum
    scaled = C * -2.5
    assert "spectrum" in scaled.__dict__
    np.testing.assert_allclose(np.sort(scaled.spectrum[0]), np.sort(-2.5 * w))
    ws, vs = scaled.spectrum
    np.testing.assert_allclose(vs @ np.diag(ws) @ vs.conj().T, scaled.matrix, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(nx=st.integers(0, 4), ny=st.integers(0, 4))
def test_builders_hermitian_property(nx, ny):
    sp = build_space(nx, ny)
    for op in (correlation_operator(sp), observable(sp, "angular_momentum_z"),
               observable(sp, "quadrature_momentum", "x"), pauli(sp, "y")):
        assert np.max(np.abs(op.matrix - op.matrix.conj().T), initial=0) <= 1e-12
