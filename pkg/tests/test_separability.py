import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import ABC, GHZ, PHI_PLUS, ket, proj
from entdist.qstate import CutSpec, DensityMatrix, PureState, StateError, UnitaryOp, apply_unitary_vector
from entdist.sampling import random_pure, random_unitary_matrix
from entdist.separability import example1_admissible, ppt_check, schmidt, vt_family_state, vt_threshold

AB = CutSpec({"A"}, {"B"})
A_BC = CutSpec({"A"}, {"B", "C"})


def werner(p):
    return DensityMatrix(p * proj(PHI_PLUS) + (1 - p) * np.eye(4) / 4, (2, 2), ("A", "B"))


class TestSchmidt:
    def test_product(self):
        sd = schmidt(PureState(ket("00"), (2, 2), ("A", "B")), AB)
        assert_allclose(sd.coefficients, [1.0, 0.0], atol=1e-12)
        assert sd.rank == 1

    def test_phi_plus(self):
        sd = schmidt(PureState(PHI_PLUS, (2, 2), ("A", "B")), AB)
        assert_allclose(sd.coefficients, [2 ** -0.5] * 2, atol=1e-12)

    def test_ghz(self):
        sd = schmidt(PureState(GHZ, (2, 2, 2), ABC), A_BC)
        assert_allclose(sd.coefficients, [2 ** -0.5] * 2, atol=1e-12)

    def test_reconstruction(self, rng):
        for _ in range(20):
            psi = random_pure(rng)
            sd = schmidt(psi, CutSpec({"B"}, {"A", "C"}))
            v = psi.amplitudes.reshape(2, 2, 2).transpose(1, 0, 2).ravel()
            assert np.max(np.abs(sd.reconstruct() - v)) <= 1e-9
            assert_allclose(sd.right_vectors.conj().T @ sd.right_vectors, np.eye(2), atol=1e-10)

    def test_local_unitary_invariance(self, rng):
        psi = random_pure(rng)
        u = UnitaryOp(np.kron(random_unitary_matrix(rng, 2), random_unitary_matrix(rng, 2)), (2, 2), ("B", "C"))
        a = schmidt(psi, A_BC).coefficients
        b = schmidt(apply_unitary_vector(psi, u), A_BC).coefficients
        assert_allclose(a, b, atol=1e-9)


class TestPPT:
    def test_phi_plus(self, phi_plus):
        v = ppt_check(phi_plus, AB)
        assert_allclose(v.min_eigenvalue, -0.5, atol=1e-12)
        assert v.is_npt and v.exact_criterion

    def test_werner_boundary(self):
        # smallest partial-transpose eigenvalue is (1 - p)/4 - p/2
        v = ppt_check(werner(1 / 3), AB)
        assert_allclose(v.min_eigenvalue, 0.0, atol=1e-12)
        assert not v.is_npt and v.certifies_separable
        assert_allclose(ppt_check(werner(0.6), AB).min_eigenvalue, 0.1 - 0.3, atol=1e-12)

    def test_product_psd(self):
        rho = DensityMatrix(proj(ket("010")), (2, 2, 2), ABC)
        v = ppt_check(rho, A_BC)
        assert not v.is_npt
        assert v.inconclusive_if_ppt  # 2 x 4 cut

    def test_witness_vector(self, phi_plus):
        from entdist.qstate import partial_transpose

        v = ppt_check(phi_plus, AB)
        w = v.witness_vector
        assert_allclose(np.real(w.conj() @ partial_transpose(phi_plus, {"A"}) @ w), -0.5, atol=1e-12)


class TestVT:
    def test_phi_plus(self):
        assert_allclose(vt_threshold(PureState(PHI_PLUS, (2, 2), ("A", "B")), AB).p_cr, 1 / 3, atol=1e-12)

    def test_product(self):
        assert_allclose(vt_threshold(PureState(ket("00"), (2, 2), ("A", "B")), AB).p_cr, 1.0, atol=1e-12)

    def test_ghz(self):
        assert_allclose(vt_threshold(PureState(GHZ, (2, 2, 2), ABC), A_BC).p_cr, 1 / 5, atol=1e-12)

    def test_family_endpoints(self):
        fam = vt_threshold(PureState(PHI_PLUS, (2, 2), ("A", "B")), AB)
        fam0 = type(fam)(fam.psi, fam.cut, fam.d_tot, 0.0, fam.p_cr)
        fam1 = type(fam)(fam.psi, fam.cut, fam.d_tot, 1.0, fam.p_cr)
        assert_allclose(vt_family_state(fam0).data, np.eye(4) / 4, atol=1e-15)
        assert_allclose(vt_family_state(fam1).data, proj(PHI_PLUS), atol=1e-15)
        with pytest.raises(StateError):
            vt_family_state(type(fam)(fam.psi, fam.cut, fam.d_tot, 1.5, fam.p_cr))

    def test_supercritical_is_npt(self):
        fam = vt_threshold(PureState(PHI_PLUS, (2, 2), ("A", "B")), AB, p=1 / 3 + 0.01)
        assert ppt_check(vt_family_state(fam), AB).is_npt

    def test_ppt_scan_agrees_on_random_two_qubit_states(self, rng):
        for _ in range(5):
            psi = random_pure(rng, (2, 2), ("A", "B"))
            base = vt_threshold(psi, AB)
            for p in np.linspace(0, 1, 200):
                fam = vt_threshold(psi, AB, p)
                npt = ppt_check(vt_family_state(fam), AB).is_npt
                if abs(p - base.p_cr) > 1e-6:
                    assert npt == (p > base.p_cr)


class TestAdmissible:
    def test_ghz_symmetric(self):
        rec = example1_admissible(PureState(GHZ, (2, 2, 2), ABC))
        assert_allclose([rec.a1a2, rec.b1b2, rec.c1c2], [0.5] * 3, atol=1e-12)
        assert not rec.admissible

    def test_product(self):
        rec = example1_admissible(PureState(ket("000"), (2, 2, 2), ABC))
        assert_allclose([rec.a1a2, rec.b1b2, rec.c1c2], [0.0] * 3, atol=1e-12)
        assert not rec.admissible

    def test_fixture_state(self, example1_psi):
        rec = example1_admissible(example1_psi)
        assert rec.admissible
        assert_allclose(rec.Upsilon, 1 / (1 + 8 * rec.M), rtol=1e-14)
