import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import ABC, GHZ, PHI_PLUS, ket, proj
from entdist.correlations import LOWER, UPPER, BoundReport, OptimizerOpts
from entdist.examples import CNOT_AC, CNOT_BC, cubitt_state
from entdist.protocol import (
    CUT_AB_C,
    CUT_AC_B,
    ENCODING_FAMILIES,
    Bracket,
    Dephasing,
    ScenarioEvaluator,
    check_distribution_conditions,
    localize,
    localized_lower_bound,
    make_record,
    purification,
    run_scenario,
    sweep,
    theorem3_search,
    verify_araki_lieb,
    verify_eq2,
    verify_eq4_pure,
    verify_eq6,
    verify_lemma1,
    verify_minfo_chain,
    verify_theorem1,
    verify_theorem4,
)
from entdist.qstate import DensityMatrix, StateError, apply_unitary, partial_trace, permute_subsystems
from entdist.sampling import random_mixed, random_pure, random_two_qubit

FAST = OptimizerOpts(restarts=4, grid=16)


def up(v):
    return Bracket.of(BoundReport(v, UPPER))


def lo(v):
    return Bracket.of(BoundReport(v, LOWER))


def ex(v):
    return Bracket.exact(v)


class TestDirectionAlgebra:
    def test_le_certified_with_upper_lhs_and_lower_rhs(self):
        assert make_record("x", up(0.5), lo(0.6)).status == "certified"

    def test_le_exact_sides(self):
        assert make_record("x", ex(0.5), ex(0.5)).status == "certified"
        rec = make_record("x", ex(0.7), ex(0.5))
        assert rec.status == "violated" and rec.sound and not rec.passed
        assert_allclose(rec.slack, -0.2)

    def test_le_wrong_directions_are_never_certified(self):
        # lower bound on the left cannot establish "<="
        rec = make_record("x", lo(0.1), ex(0.5))
        assert not rec.sound and rec.status in ("supported", "unsupported")

    def test_le_upper_rhs_gives_point_estimate(self):
        rec = make_record("x", ex(0.2), up(0.5))
        assert rec.status == "supported" and not rec.sound
        assert make_record("x", ex(0.7), up(0.5)).status == "unsupported"

    def test_gt(self):
        assert make_record("x", lo(0.3), ex(0.0), "gt").status == "certified"
        assert make_record("x", ex(0.0), ex(0.0), "gt", tol=0.0).status == "violated"
        assert not make_record("x", up(0.3), ex(0.0), "gt").sound

    def test_eq_needs_exact(self):
        assert make_record("x", ex(1.0), ex(1.0 + 1e-10), "eq").status == "certified"
        assert not make_record("x", up(1.0), ex(1.0), "eq").sound
        with pytest.raises(ValueError):
            make_record("x", ex(1.0), ex(1.0), "approx")

    def test_arithmetic(self):
        a = Bracket(BoundReport(2.0, UPPER), BoundReport(1.0, LOWER))
        b = ex(0.5)
        d = a - b
        assert (d.upper.value, d.upper.direction) == (1.5, UPPER)
        assert (d.lower.value, d.lower.direction) == (0.5, LOWER)
        s = b - a
        assert (s.upper.value, s.lower.value) == (-0.5, -1.5)
        ab = s.absolute()
        assert (ab.upper.value, ab.lower.value) == (1.5, 0.5)
        assert (b + b).is_exact and (b + b).value == 1.0
        assert a.scale(2.0).upper.value == 4.0
        with pytest.raises(ValueError):
            a.scale(-1.0)

    def test_absolute_straddling_zero(self):
        c = Bracket(BoundReport(0.3, UPPER), BoundReport(-0.4, LOWER)).absolute()
        assert (c.upper.value, c.lower.value) == (0.4, 0.0)

    def test_of_lower_only(self):
        b = Bracket.of(BoundReport(0.2, LOWER))
        assert b.upper.value == math.inf and b.lower.value == 0.2

    def test_record_dict_is_json(self):
        d = make_record("x", ex(0.1), ex(0.2)).to_dict()
        assert json.loads(json.dumps(d))["status"] == "certified"
        assert {"name", "lhs_value", "lhs_direction", "rhs_value", "rhs_direction",
                "slack", "sound", "pass", "certificate_kind"} <= set(d)


class TestScenario:
    def test_labels_validated(self, phi_plus):
        with pytest.raises(StateError):
            run_scenario(phi_plus)

    def test_encoding_support(self):
        with pytest.raises(StateError):
            run_scenario(cubitt_state(), CNOT_BC)
        with pytest.raises(StateError):
            run_scenario(cubitt_state(), CNOT_AC, CNOT_AC)

    def test_dephasing_encoding(self, rng):
        s = run_scenario(random_mixed(rng), Dephasing("C"))
        assert_allclose(s.beta.data.reshape(4, 2, 4, 2)[:, 0, :, 1], 0, atol=1e-15)

    def test_missing_stage(self, rng):
        s = run_scenario(random_mixed(rng))
        with pytest.raises(StateError):
            s.stage("gamma")

    def test_evaluator_transfers_across_unitary(self):
        s = run_scenario(cubitt_state(), CNOT_AC, CNOT_BC)
        ev = ScenarioEvaluator(s, FAST)
        # AC:B of alpha equals AC:B of beta by local-unitary invariance
        assert ev.ree("beta", CUT_AC_B).is_exact
        assert_allclose(ev.ree("beta", CUT_AC_B).value, ev.ree("alpha", CUT_AC_B).value, atol=1e-12)


class TestConditions:
    def test_identity_product_fails_entanglement(self, rng):
        alpha = DensityMatrix(np.eye(8) / 8, (2, 2, 2), ABC)
        recs = check_distribution_conditions(run_scenario(alpha), FAST)
        assert [r.status for r in recs[:2]] == ["certified", "certified"]
        # PPT on a 2 x 4 cut is inconclusive, so the claim is simply not established
        assert not recs[2].passed and recs[2].status == "unsupported"

    def test_cubitt(self):
        recs = check_distribution_conditions(run_scenario(cubitt_state(), CNOT_AC, CNOT_BC), FAST)
        by = {r.name: r for r in recs}
        assert by["E_A:BC(beta) > 0"].status == "certified"
        assert by["E_B:AC(alpha) = 0"].status == "certified"


class TestLocalize:
    def test_phi_plus_with_ancilla(self):
        beta = DensityMatrix(np.kron(proj(PHI_PLUS), proj(ket("0"))), (2, 2, 2), ABC)
        res = localize(beta)
        assert_allclose(res.outcome_probability, 1.0, atol=1e-12)
        assert_allclose(res.verdict.min_eigenvalue, -0.5, atol=1e-12)

    def test_cubitt_beta(self):
        beta = run_scenario(cubitt_state(), CNOT_AC).beta
        res = localize(beta)
        assert_allclose(res.outcome_probability, 1 / 3, atol=1e-12)
        assert res.verdict.is_npt
        assert localized_lower_bound(res).value > 0

    def test_reassembly(self, rng):
        # the transformed state is the BC-unitary image of beta
        beta = run_scenario(cubitt_state(), CNOT_AC).beta
        res = localize(beta)
        back = apply_unitary(res.transformed, res.localizing_unitary.dagger())
        assert_allclose(back.data, beta.data, atol=1e-12)

    def test_ppt_rejected(self):
        with pytest.raises(StateError):
            localize(DensityMatrix(np.eye(8) / 8, (2, 2, 2), ABC))


class TestVerifiers:
    def test_theorem1_ghz(self):
        rho = DensityMatrix(proj(GHZ), (2, 2, 2), ABC)
        rec = verify_theorem1(rho, FAST)
        assert rec.status in ("certified", "supported")

    def test_theorem1_pure_random(self, rng):
        for _ in range(10):
            assert verify_theorem1(random_pure(rng).projector(), FAST).status == "certified"

    def test_eq4(self, rng):
        for _ in range(10):
            recs = verify_eq4_pure(random_two_qubit(rng))
            assert all(r.status == "certified" for r in recs)

    def test_purification(self, rng):
        rho = random_two_qubit(rng)
        psi = purification(rho).projector()
        assert_allclose(partial_trace(psi, {"A", "C"}).data,
                        permute_subsystems(rho, ("A", "C")).data, atol=1e-12)

    def test_eq7_and_araki_lieb(self, rng):
        for _ in range(20):
            rho = random_mixed(rng)
            assert verify_minfo_chain(rho).status == "certified"
            assert verify_araki_lieb(rho).status == "certified"

    def test_eq2_and_eq6_cubitt(self):
        from entdist.correlations import ree
        from entdist.examples import cubitt_carrier_ensemble
        s = run_scenario(cubitt_state(), CNOT_AC, CNOT_BC)
        s = s.with_certificate("beta", CUT_AB_C,
                               ree(s.beta, CUT_AB_C, known_separable=cubitt_carrier_ensemble(1.0)))
        ev = ScenarioEvaluator(s, FAST)
        assert verify_eq2(s, FAST, ev).status in ("certified", "supported")
        recs = verify_eq6(s, FAST, ev)
        assert len(recs) == 2
        assert all(r.status in ("certified", "supported") for r in recs)

    def test_lemma1(self, rng):
        recs = verify_lemma1(random_mixed(rng), FAST)
        assert len(recs) == 3
        assert recs[0].status != "violated"

    def test_theorem4_cubitt(self):
        from entdist.examples import cubitt_carrier_ensemble
        s = run_scenario(cubitt_state(), CNOT_AC, CNOT_BC)
        from entdist.correlations import ree
        s = s.with_certificate("beta", CUT_AB_C,
                               ree(s.beta, CUT_AB_C, known_separable=cubitt_carrier_ensemble(1.0)))
        assert verify_theorem4(s, FAST).status == "certified"

    def test_theorem4_precondition(self, rng):
        beta = DensityMatrix(np.kron(proj(ket("0")), proj(PHI_PLUS)), (2, 2, 2), ABC)
        with pytest.raises(StateError):
            verify_theorem4(run_scenario(beta), FAST)


class TestTheorem3:
    def test_no_candidates(self):
        rep = theorem3_search(40, seed=7)
        assert rep.candidates == []
        assert sum(f["trials"] for f in rep.by_family.values()) == 40
        assert set(rep.by_family) == set(ENCODING_FAMILIES)
        # the aligned family keeps the carrier PPT
        assert rep.by_family["aligned"]["carrier_ppt"] == 10

    def test_trials_validated(self):
        with pytest.raises(ValueError):
            theorem3_search(0)


class TestSweep:
    def test_seeded_instances_reproduce(self):
        a = [r.to_dict() for _, r in sweep("eq7", n=5, seed=3)]
        b = [r.to_dict() for _, r in sweep("eq7", n=5, seed=3)]
        assert a == b

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            list(sweep("theorem9"))

    def test_theorem3_suite(self):
        [(i, rec)] = list(sweep("theorem3", trials=8))
        assert rec.status == "certified"
