import numpy as np
import pytest

from uwit import (
    BadParameter,
    Degenerate,
    DensityState,
    DimensionMismatch,
    NotHermitian,
    Povm,
    bell_phi_plus,
    born_stats,
    correlation_tensor,
    eig_hermitian,
    isotropic,
    kron_state,
    majorized_by,
    maximally_mixed,
    mub_bases,
    observable_from_matrix,
    partial_trace,
    pauli_observable,
    product_observable_stats,
    schmidt_observables,
    state_from_correlation_tensor,
    von_neumann_entropy,
    werner,
)
from uwit.quantum import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    projector,
    random_ket,
    random_mixed_state,
    random_product_state,
)

SX = pauli_observable("x")
SY = pauli_observable("y")
SZ = pauli_observable("z")


def joint_product_oracle(state, a, b):
    """Independent route: eigendecompose kron(a, b) and bin by eigenvalue."""
    joint = np.kron(a.matrix, b.matrix)
    obs = observable_from_matrix(joint)
    return [
        (ev, float(np.trace(p @ state.matrix).real))
        for ev, p in zip(obs.eigenvalues, obs.projectors)
    ]


class TestEig:
    def test_pauli_z(self):
        w, v = eig_hermitian(PAULI_Z)
        assert np.allclose(w, [1.0, -1.0])
        assert abs(v[0, 0]) == pytest.approx(1.0)

    def test_identity(self):
        w, _ = eig_hermitian(np.eye(2))
        assert np.allclose(w, [1.0, 1.0])

    def test_pauli_x(self):
        w, v = eig_hermitian(PAULI_X)
        assert np.allclose(w, [1.0, -1.0])
        assert np.allclose(np.abs(v[:, 0]), [1 / np.sqrt(2)] * 2)

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_reconstruction(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            d = int(rng.integers(2, 7))
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            h = (a + a.conj().T) / 2
            w, v = eig_hermitian(h)
            assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) < 1e-8

    def test_observable_merges_degenerate(self):
        obs = observable_from_matrix(np.eye(3))
        assert obs.eigenvalues == (1.0,)
        assert np.allclose(obs.projectors[0], np.eye(3))
        assert not obs.nondegenerate

    def test_observable_reconstruction(self):
        rng = np.random.default_rng(30)
        for _ in range(30):
            d = int(rng.integers(2, 6))
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            h = (a + a.conj().T) / 2
            obs = observable_from_matrix(h)
            rebuilt = sum(ev * p for ev, p in zip(obs.eigenvalues, obs.projectors))
            assert np.max(np.abs(rebuilt - h)) < 1e-8
            total = sum(obs.projectors)
            assert np.max(np.abs(total - np.eye(d))) < 1e-9


class TestBornRule:
    def test_eigenstate(self):
        ket0 = DensityState(np.diag([1.0, 0.0]).astype(complex))
        assert np.allclose(born_stats(ket0, SZ.povm()).values, [1.0, 0.0])
        assert np.allclose(born_stats(ket0, SX.povm()).values, [0.5, 0.5])

    def test_maximally_mixed(self):
        rng = np.random.default_rng(32)
        state = maximally_mixed(2)
        for _ in range(20):
            direction = rng.normal(size=3)
            from uwit import bloch_observable

            meas = bloch_observable(direction / np.linalg.norm(direction))
            assert np.allclose(born_stats(state, meas.povm()).values, [0.5, 0.5])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            born_stats(maximally_mixed(3), SZ.povm())


class TestProductStats:
    def test_phi_plus_xx(self):
        stats = product_observable_stats(bell_phi_plus(), SX, SX)
        assert np.allclose(stats.values, [1.0, 0.0], atol=1e-12)
        oracle = joint_product_oracle(bell_phi_plus(), SX, SX)
        assert oracle[0][0] == pytest.approx(1.0) and oracle[0][1] == pytest.approx(1.0)

    def test_phi_plus_yy(self):
        stats = product_observable_stats(bell_phi_plus(), SY, SY)
        assert np.allclose(stats.values, [0.0, 1.0], atol=1e-12)
        oracle = dict(joint_product_oracle(bell_phi_plus(), SY, SY))
        assert oracle[-1.0] == pytest.approx(1.0)

    def test_product_zero_state(self):
        ket0 = DensityState(np.diag([1.0, 0.0]).astype(complex))
        stats = product_observable_stats(kron_state(ket0, ket0), SX, SX)
        assert np.allclose(stats.values, [0.5, 0.5])

    def test_matches_oracle_on_random_states(self):
        rng = np.random.default_rng(33)
        for _ in range(50):
            state = random_mixed_state(4, rng, dims=(2, 2))
            stats = product_observable_stats(state, SX, SY)
            oracle = joint_product_oracle(state, SX, SY)
            assert np.allclose(stats.values, [p for _, p in oracle], atol=1e-9)

    def test_local_majorization_for_products(self):
        # joint product statistics of a product state are majorized by both
        # local statistics, over binned Pauli pairs and generic observables
        rng = np.random.default_rng(34)
        from uwit.quantum import random_qubit_observable

        for i in range(1000):
            eta = random_mixed_state(2, rng)
            sigma = random_mixed_state(2, rng)
            state = kron_state(eta, sigma)
            if i % 2 == 0:
                a, b = SX, SY
            else:
                a, b = random_qubit_observable(rng), random_qubit_observable(rng)
            joint = product_observable_stats(state, a, b)
            assert majorized_by(joint, born_stats(eta, a.povm()))
            assert majorized_by(joint, born_stats(sigma, b.povm()))


class TestPartialTrace:
    def test_bell(self):
        assert np.allclose(partial_trace(bell_phi_plus(), "B").matrix, np.eye(2) / 2)
        assert np.allclose(partial_trace(bell_phi_plus(), "A").matrix, np.eye(2) / 2)

    def test_product(self):
        rng = np.random.default_rng(35)
        eta = random_mixed_state(2, rng)
        sigma = random_mixed_state(3, rng)
        state = kron_state(eta, sigma)
        assert np.allclose(partial_trace(state, "A").matrix, eta.matrix, atol=1e-12)
        assert np.allclose(partial_trace(state, "B").matrix, sigma.matrix, atol=1e-12)

    def test_werner_reduction(self):
        assert np.allclose(partial_trace(werner(0.7), "B").matrix, np.eye(2) / 2)

    def test_preserves_positivity_and_trace(self):
        rng = np.random.default_rng(36)
        for _ in range(30):
            state = random_mixed_state(6, rng, dims=(2, 3))
            reduced = partial_trace(state, "B")
            assert abs(np.trace(reduced.matrix).real - 1.0) < 1e-10
            assert np.linalg.eigvalsh(reduced.matrix)[0] > -1e-10


class TestFamilies:
    def test_werner_limits(self):
        assert np.allclose(werner(0.0).matrix, np.eye(4) / 4)
        assert np.allclose(werner(1.0).matrix, bell_phi_plus().matrix)
        with pytest.raises(BadParameter):
            werner(1.5)

    def test_werner_correlator(self):
        value = np.trace(np.kron(PAULI_X, PAULI_X) @ werner(0.5).matrix).real
        assert value == pytest.approx(0.5)

    def test_isotropic(self):
        assert np.allclose(isotropic(2, 1.0).matrix, bell_phi_plus().matrix)
        assert np.allclose(isotropic(2, 0.25).matrix, np.eye(4) / 4)
        assert np.allclose(isotropic(3, 1.0 / 9.0).matrix, np.eye(9) / 9)
        with pytest.raises(BadParameter):
            isotropic(1, 0.5)

    def test_density_state_validation(self):
        with pytest.raises(NotHermitian):
            DensityState(np.array([[0.5, 0.5], [0.0, 0.5]]))
        with pytest.raises(BadParameter):
            DensityState(np.eye(2))
        with pytest.raises(BadParameter):
            DensityState(np.diag([1.5, -0.5]).astype(complex))

    def test_povm_validation(self):
        with pytest.raises(BadParameter):
            Povm((np.diag([1.0, 0.0]), np.diag([0.0, 0.5])), ("a", "b"))


class TestMub:
    def test_qubit_triple_is_pauli(self):
        bases = mub_bases(2, 3)
        assert np.allclose(bases[0].matrix, PAULI_Z)
        assert np.allclose(bases[1].matrix, PAULI_X)
        assert np.allclose(bases[2].matrix, PAULI_Y)

    def test_qubit_pair_overlaps(self):
        bases = mub_bases(2, 2)
        for p in bases[0].projectors:
            for q in bases[1].projectors:
                assert np.trace(p @ q).real == pytest.approx(0.5, abs=1e-9)

    def test_qutrit_overlaps(self):
        bases = mub_bases(3, 4)
        for i in range(4):
            for j in range(i + 1, 4):
                for p in bases[i].projectors:
                    for q in bases[j].projectors:
                        assert np.trace(p @ q).real == pytest.approx(1 / 3, abs=1e-9)

    def test_rejects_composite_dimension(self):
        with pytest.raises(BadParameter):
            mub_bases(4, 2)
        with pytest.raises(BadParameter):
            mub_bases(3, 5)


class TestCorrelationTensor:
    def test_bell(self):
        t = correlation_tensor(bell_phi_plus())
        assert np.allclose(np.diag(t), [1.0, 1.0, -1.0, 1.0], atol=1e-12)
        assert np.allclose(t - np.diag(np.diag(t)), 0.0, atol=1e-12)

    def test_maximally_mixed(self):
        t = correlation_tensor(maximally_mixed(4, dims=(2, 2)))
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert np.allclose(t, expected, atol=1e-12)

    def test_werner_linearity(self):
        for w in (0.2, 0.5, 0.9):
            t = correlation_tensor(werner(w))
            assert t[1, 1] == pytest.approx(w)
            assert t[2, 2] == pytest.approx(-w)
            assert t[3, 3] == pytest.approx(w)

    def test_round_trip(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            state = random_mixed_state(4, rng, dims=(2, 2))
            rebuilt = state_from_correlation_tensor(correlation_tensor(state))
            assert np.max(np.abs(rebuilt.matrix - state.matrix)) < 1e-8


class TestSamplersAndSchmidt:
    def test_random_states_valid(self):
        rng = np.random.default_rng(38)
        for _ in range(20):
            random_mixed_state(3, rng)
            random_product_state(2, 2, rng)

    def test_entropy(self):
        assert von_neumann_entropy(maximally_mixed(2)) == pytest.approx(1.0)
        assert von_neumann_entropy(bell_phi_plus()) == pytest.approx(0.0, abs=1e-9)

    def test_schmidt_observables_diagonalize(self):
        rng = np.random.default_rng(39)
        for _ in range(20):
            ket = random_ket(4, rng)
            (za, xa), (zb, xb) = schmidt_observables(ket, (2, 2))
            state = DensityState(projector(ket), dims=(2, 2))
            # the Schmidt-basis pair sees perfectly correlated outcomes
            stats = product_observable_stats(state, za, zb)
            joint = np.kron(za.projectors[0], zb.projectors[1])
            cross = float(np.trace(joint @ state.matrix).real)
            assert cross == pytest.approx(0.0, abs=1e-9)
            assert stats.values.sum() == pytest.approx(1.0)
            for obs in (za, xa, zb, xb):
                assert obs.nondegenerate
