"""Acceptance criteria, one test per criterion.

Each test prints a ``[ACCEPT nn] PASS|FAIL`` line with its runtime; the lines
are repeated in the terminal summary.
"""

import math
import time

import numpy as np
from numpy.testing import assert_allclose

from conftest import ABC, PHI_PLUS, ket, proj
from entdist import cli
from entdist.correlations import EXACT, discord, discord_sep_bound, ree, ree_flag_eval
from entdist.examples import (
    CNOT_AC,
    CNOT_BC,
    Example2Params,
    Example3Params,
    cubitt_carrier_ensemble,
    cubitt_state,
    example2_run,
    example2_states,
    example3_run,
    example3_s_range,
    example3_states,
    example3_sweep,
    example3_thresholds,
    npt_transition,
)
from entdist.infotheory import conditional_entropy
from entdist.protocol import (
    CUT_A_CB,
    CUT_AB_C,
    CUT_AC_B,
    localize,
    purification,
    run_scenario,
    scenario_gain,
    theorem3_search,
    verify_araki_lieb,
    verify_minfo_chain,
    verify_theorem4,
)
from entdist.qstate import CutSpec, DensityMatrix, project_subsystem
from entdist.sampling import random_mixed, random_pure, random_separable, random_two_qubit
from entdist.separability import ppt_check

RESULTS = []
P_GRID = (0.25, 0.5, 0.75)


def report(n, title, ok, elapsed, detail=""):
    line = f"[ACCEPT {n:02d}] {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f} s){': ' + detail if detail else ''}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def rng_for(n, i):
    return np.random.default_rng([2026, n, i])


def cnot_perm(control, target):
    m = np.zeros((8, 8))
    for i in range(8):
        bits = [(i >> (2 - k)) & 1 for k in range(3)]
        bits[target] ^= bits[control]
        m[bits[0] * 4 + bits[1] * 2 + bits[2], i] = 1.0
    return m


def gamma_closed_form(p):
    """1/3 phi+ (x) |0><0| + 2/3 [p I/4 + (1-p)(|00><00| + |11><11|)/2] (x) |1><1|."""
    sep = p * np.eye(4) / 4 + (1 - p) * (proj(ket("00")) + proj(ket("11"))) / 2
    return np.kron(proj(PHI_PLUS), proj(ket("0"))) / 3 + 2 * np.kron(sep, proj(ket("1"))) / 3


def vt_pcr(vec, d_left):
    sv = np.linalg.svd(vec.reshape(d_left, -1), compute_uv=False)
    return 1.0 / (1.0 + vec.size * sv[0] * sv[1])


def test_01_cubitt_final_entanglement():
    t0 = time.perf_counter()
    gamma = run_scenario(cubitt_state(), CNOT_AC, CNOT_BC).gamma
    e = ree_flag_eval(gamma, "C", CUT_A_CB)
    p0, cond = project_subsystem(gamma, "C", np.array([1.0, 0.0]))
    fid = float(np.real(PHI_PLUS @ cond.data @ PHI_PLUS))
    elapsed = time.perf_counter() - t0
    ok = (e.direction == EXACT and abs(e.value - 1 / 3) <= 1e-9 and abs(p0 - 1 / 3) <= 1e-9
          and fid >= 1 - 1e-9 and elapsed < 1.0)
    report(1, "Cubitt E_A:BC(gamma) = 1/3, P(C=0) = 1/3, conditional phi+", ok, elapsed,
           f"E={e.value:.12g} ({e.direction}) P0={p0:.12g} F={fid:.12g}")


def test_02_carrier_separability():
    t0 = time.perf_counter()
    worst = math.inf
    for p in (1.0,) + P_GRID:
        alpha, _ = example2_states(Example2Params(p))
        s = run_scenario(alpha, CNOT_AC, CNOT_BC)
        for rho in (s.alpha, s.beta, s.gamma):
            worst = min(worst, ppt_check(rho, CUT_AB_C).min_eigenvalue)
    elapsed = time.perf_counter() - t0
    report(2, "C:AB partial transpose PSD for alpha, beta, gamma", worst >= -1e-9 and elapsed < 1.0,
           elapsed, f"min eigenvalue {worst:.3g}")


def test_03_example2():
    t0 = time.perf_counter()
    ok, details = True, []
    for p in P_GRID:
        alpha, _ = example2_states(Example2Params(p))
        u = cnot_perm(1, 2) @ cnot_perm(0, 2)
        gamma_oracle = u @ alpha.data @ u.T
        s, rep = example2_run(p, full=False)
        diff = max(np.max(np.abs(s.gamma.data - gamma_closed_form(p))),
                   np.max(np.abs(gamma_oracle - gamma_closed_form(p))))
        npt = ppt_check(alpha, CUT_AC_B).min_eigenvalue
        rec = rep.record("E_initial <= (1-p)/3")
        ok &= diff <= 1e-12 and npt < 0 and rec.passed and rec.sound
        details.append(f"p={p}: |dgamma|={diff:.1e} minPT={npt:.4g} E_init={rec.lhs.value:.6g}<={(1 - p) / 3:.6g} "
                       f"[{rec.status}]")
    report(3, "Example 2 gamma closed form, alpha AC:B NPT, flag-chain bound", ok,
           time.perf_counter() - t0, "; ".join(details))


def test_04_example3():
    t0 = time.perf_counter()
    u = 0.01
    s = 4 * u * (1 - u) / (1 - 4 * u * u)
    params = Example3Params(u, s)
    alpha, beta, psis = example3_states(params)
    th = example3_thresholds(u, s)
    # independent thresholds from singular values: alpha across A:B, branches across C:AB
    psi_ab = np.array([math.sqrt(s), 0, 0, math.sqrt(1 - s)])
    pcr = [vt_pcr(psi_ab, 2)] + [vt_pcr(ps.amplitudes.reshape(2, 2, 2).transpose(2, 0, 1).ravel(), 2)
                                  for ps in psis]
    # alpha's AB part lives in d_tot = 4, so its threshold uses the two-qubit family
    thresholds_ok = (params.p <= pcr[0] + 1e-12 and params.p <= pcr[1] + 1e-12
                     and params.p <= pcr[2] + 1e-12)
    assert_allclose([th["alpha_threshold"], th["beta0_threshold"], th["beta1_threshold"]], pcr, rtol=1e-10)
    m_small = ppt_check(beta, CUT_A_CB).min_eigenvalue
    lo, _ = example3_s_range(0.1)
    _, beta_big, _ = example3_states(Example3Params(0.1, lo))
    m_big = ppt_check(beta_big, CUT_A_CB).min_eigenvalue
    t = npt_transition(example3_sweep(np.linspace(0.001, 0.13, 50)))
    elapsed = time.perf_counter() - t0
    ok = (thresholds_ok and m_small < -1e-9 and m_big >= -1e-9 and t is not None
          and 0.015 <= t <= 0.03 and elapsed < 10.0)
    report(4, "Example 3 thresholds, A:BC NPT at u=0.01, PPT at u=0.1, transition", ok, elapsed,
           f"p={params.p:.6g} p_cr={[round(float(x), 6) for x in pcr]} minPT(0.01)={m_small:.4g} "
           f"minPT(0.1)={m_big:.3g} transition u={t}")


def test_05_araki_lieb():
    t0 = time.perf_counter()
    fails = sum(verify_araki_lieb(random_pure(rng_for(5, i)).projector(), tol=1e-8).status != "certified"
                for i in range(500))
    elapsed = time.perf_counter() - t0
    report(5, "Araki-Lieb on 500 random pure states", fails == 0 and elapsed < 5.0, elapsed,
           f"{fails} failures")


def test_06_tightness_at_cubitt_beta():
    t0 = time.perf_counter()
    beta = run_scenario(cubitt_state(), CNOT_AC).beta
    d = discord(beta, "C")
    e = ree(beta, CUT_A_CB)
    elapsed = time.perf_counter() - t0
    gap = abs(d.value - e.value)
    report(6, "|D_AB|C(beta) - E_A:CB(beta)| <= 0.02 at Cubitt beta", gap <= 0.02 and elapsed < 120.0,
           elapsed, f"D={d.value:.12g} ({d.direction}) E={e.value:.12g} ({e.direction}) gap={gap:.3g}")


def test_07_eq4_identity():
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(200):
        rho_ac = random_two_qubit(rng_for(7, i))
        phi = purification(rho_ac).projector()
        e1, e2 = ree(phi, CUT_A_CB), ree(phi, CUT_AC_B)
        assert e1.direction == e2.direction == EXACT
        worst = max(worst, abs(e1.value - e2.value + conditional_entropy(rho_ac, {"C"}, {"A"})))
    elapsed = time.perf_counter() - t0
    report(7, "(E_A:CB - E_AC:B) = -S_C|A on 200 purifications", worst <= 1e-8 and elapsed < 5.0, elapsed,
           f"max residual {worst:.3g}")


def test_08_mutual_information_chain():
    t0 = time.perf_counter()
    recs = [verify_minfo_chain(random_mixed(rng_for(8, i)), tol=1e-8) for i in range(500)]
    fails = sum(r.status != "certified" for r in recs)
    report(8, "I_A:CB - I_AC:B <= I_AB:C on 500 mixed states", fails == 0, time.perf_counter() - t0,
           f"{fails} failures, worst slack {min(r.slack for r in recs):.4g}")


def test_09_theorem4():
    t0 = time.perf_counter()
    bound = 1 - 1 / 64
    s = run_scenario(cubitt_state(), CNOT_AC, CNOT_BC)
    s = s.with_certificate("beta", CUT_AB_C, ree(s.beta, CUT_AB_C, known_separable=cubitt_carrier_ensemble(1.0)))
    rec_c = verify_theorem4(s)
    gain_c = scenario_gain(s)
    s3, _ = example3_run(Example3Params(0.01), full=False)
    rec_3 = verify_theorem4(s3)
    ok = (rec_c.status == "certified" and rec_3.status == "certified"
          and rec_c.lhs.value <= bound and rec_3.lhs.value <= bound
          and gain_c.lower.value >= 1 / 3 - 1e-6)
    report(9, "entanglement gain <= 63/64 bit; Cubitt gain >= 1/3", ok, time.perf_counter() - t0,
           f"Cubitt gain in [{gain_c.lower.value:.12g}, {gain_c.upper.value:.12g}], "
           f"Example 3 gain <= {rec_3.lhs.value:.6g}")


def test_10_separable_discord_bound():
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(200):
        ens = random_separable(rng_for(10, i), (2, 2), (2,), ("A", "B"), ("C",))
        worst = max(worst, discord(ens.assemble(ABC), "C").value)
    bound = discord_sep_bound(4, 2)
    assert bound == 63 / 64
    report(10, "discord of 200 separable AB:C states <= 63/64", worst <= 63 / 64 + 1e-6,
           time.perf_counter() - t0, f"max discord {worst:.6g}")


def test_11_theorem3_search():
    t0 = time.perf_counter()
    rep = theorem3_search(1000, seed=42)
    elapsed = time.perf_counter() - t0
    report(11, "1000-trial falsification search: zero candidates", not rep.candidates and elapsed < 60.0,
           elapsed, f"carrier PPT in {rep.carrier_ppt}, A:BC NPT in {rep.npt_a_bc}, "
           f"{len(rep.candidates)} candidates")


def test_12_vt_threshold_scan():
    t0 = time.perf_counter()
    ps = np.linspace(0, 1, 200)
    npt = [ppt_check(DensityMatrix(p * proj(PHI_PLUS) + (1 - p) * np.eye(4) / 4, (2, 2), ("A", "B")),
                     CutSpec({"A"}, {"B"})).is_npt for p in ps]
    first = int(np.argmax(npt))
    monotone = not any(npt[:first]) and all(npt[first:])
    lo, hi = ps[first - 1], ps[first]
    ok = monotone and lo <= 1 / 3 <= hi
    report(12, "PPT scan brackets p_cr = 1/3 for phi+", ok, time.perf_counter() - t0,
           f"last PPT p={lo:.6g}, first NPT p={hi:.6g}")


def test_13_localization():
    t0 = time.perf_counter()
    beta_c = run_scenario(cubitt_state(), CNOT_AC).beta
    _, beta_3, _ = example3_states(Example3Params(0.01))
    rc, r3 = localize(beta_c), localize(beta_3)
    ok = all(r.verdict.is_npt and r.outcome_probability > 0 for r in (rc, r3))
    report(13, "localization onto A:B for Cubitt and Example 3", ok, time.perf_counter() - t0,
           f"Cubitt P={rc.outcome_probability:.6g} minPT={rc.verdict.min_eigenvalue:.4g}; "
           f"Example 3 P={r3.outcome_probability:.6g} minPT={r3.verdict.min_eigenvalue:.4g}")


def test_14_determinism(tmp_path):
    t0 = time.perf_counter()
    outs, codes = [], []
    for k in range(2):
        path = tmp_path / f"all{k}.jsonl"
        codes.append(cli.main(["verify", "all", "--seed", "42", "--deterministic", "--out", str(path)]))
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report(14, "verify all --seed 42 --deterministic is byte-identical", ok, time.perf_counter() - t0,
           f"{len(outs[0])} bytes, exit codes {codes}")
