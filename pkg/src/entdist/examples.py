"""Exact state families and end-to-end runs of the distribution examples.

Matrices for the three-qubit families are assembled from rational weights
(thirds and sixths) and converted to floating point once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .correlations import EXACT, BoundReport, Certificate, OptimizerOpts, SeparableEnsemble
from .protocol import (
    ABC,
    CUT_A_CB,
    CUT_AB_C,
    CUT_AC_B,
    Bracket,
    ScenarioEvaluator,
    ScenarioState,
    VerificationRecord,
    check_distribution_conditions,
    localize,
    make_record,
    run_scenario,
    verify_eq2,
    verify_eq6,
    verify_theorem4,
)
from .qstate import (
    CutSpec,
    DensityMatrix,
    PureState,
    StateError,
    UnitaryOp,
    apply_unitary,
    apply_unitary_vector,
    cnot,
    project_subsystem,
)
from .separability import example1_admissible, ppt_check, schmidt, vt_family_state, vt_threshold

_KET = {b: np.eye(2)[b] for b in (0, 1)}
PHI_PLUS = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)
CNOT_AC = cnot("A", "C")
CNOT_BC = cnot("B", "C")


def _basis_proj(*bits: int) -> np.ndarray:
    v = np.zeros(2 ** len(bits))
    v[int("".join(map(str, bits)), 2)] = 1.0
    return np.outer(v, v)


def _phi_plus_ab() -> np.ndarray:
    # 2 * |phi+><phi+|, integer entries
    m = np.zeros((4, 4))
    for i in (0, 3):
        for j in (0, 3):
            m[i, j] = 1.0
    return m


def _assemble(terms) -> np.ndarray:
    """Sum of Fraction-weighted AB blocks tensored with C projectors."""
    out = np.zeros((8, 8))
    for weight, ab, c in terms:
        out += float(weight) * np.kron(ab, _basis_proj(c))
    return out


def cubitt_state() -> DensityMatrix:
    """Three-qubit initial state of the original separable-carrier protocol (C classical)."""
    third, sixth = Fraction(1, 3), Fraction(1, 6)
    m = _assemble([
        (third / 2, _phi_plus_ab(), 0),
        (sixth, _basis_proj(0, 1), 0),
        (sixth, _basis_proj(1, 0), 0),
        (sixth, _basis_proj(0, 0), 1),
        (sixth, _basis_proj(1, 1), 1),
    ])
    return DensityMatrix(m, (2, 2, 2), ABC)


def lambda_ent() -> DensityMatrix:
    """Companion state carrying a maximally entangled AB pair flagged by C = 0."""
    third = Fraction(1, 3)
    m = _assemble([
        (third / 2, _phi_plus_ab(), 0),
        (third, _basis_proj(0, 0), 1),
        (third, _basis_proj(1, 1), 1),
    ])
    return DensityMatrix(m, (2, 2, 2), ABC)


@dataclass(frozen=True)
class Example2Params:
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise StateError(f"p = {self.p} outside [0, 1]")


@dataclass(frozen=True)
class Example3Params:
    u: float = 0.01
    s: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.u <= 1.0:
            raise StateError(f"u = {self.u} outside [0, 1]")
        lo, hi = example3_s_range(self.u)
        if self.s is None:
            object.__setattr__(self, "s", lo)
        if not 0.0 <= self.s <= 1.0:
            raise StateError(f"s = {self.s} outside [0, 1]")

    @property
    def p(self) -> float:
        return 1.0 / (1.0 + 4.0 * math.sqrt(self.s * (1.0 - self.s)))


def example2_states(params: Example2Params) -> tuple[DensityMatrix, DensityMatrix]:
    """Return (alpha, Lambda_ent) with alpha = p Lambda + (1 - p) Lambda_ent."""
    lam, ent = cubitt_state(), lambda_ent()
    alpha = DensityMatrix(params.p * lam.data + (1.0 - params.p) * ent.data, (2, 2, 2), ABC)
    return alpha, ent


def example2_gamma_expected(p: float) -> DensityMatrix:
    """Closed form of the final state after both CNOTs."""
    sep = p * np.eye(4) / 4 + (1 - p) * (_basis_proj(0, 0) + _basis_proj(1, 1)) / 2
    m = (np.kron(_phi_plus_ab() / 2, _basis_proj(0)) / 3
         + 2.0 * np.kron(sep, _basis_proj(1)) / 3)
    return DensityMatrix(m, (2, 2, 2), ABC)


def _phase_terms(weight: float, n: int = 3):
    """(w, c_phi, ab_phi) triples averaging to the GHZ-like coherence."""
    out = []
    for k in range(n):
        ph = 2.0 * math.pi * k / n
        c = np.array([1.0, np.exp(1j * ph)]) / math.sqrt(2.0)
        ab = np.array([1.0, 0.0, 0.0, np.exp(-1j * ph)]) / math.sqrt(2.0)
        out.append((weight / n, c, ab))
    return out


def cubitt_carrier_ensemble(p: float = 1.0) -> SeparableEnsemble:
    """Explicit C:AB product decomposition of the encoded Example-2 state.

    Phase averaging over three roots of unity removes every coherence except
    |000><111|, which reproduces the GHZ component; the rest is diagonal.
    """
    terms = _phase_terms(2.0 / 3.0)
    diag = [
        (p / 6, 0, (0, 1)),
        (p / 6, 1, (1, 0)),
        ((1 - p) / 6, 1, (0, 0)),
        ((1 - p) / 6, 0, (1, 1)),
    ]
    for w, c, ab in diag:
        v = np.zeros(4)
        v[2 * ab[0] + ab[1]] = 1.0
        terms.append((w, _KET[c].astype(complex), v.astype(complex)))
    terms = [t for t in terms if t[0] > 0]
    w = np.array([t[0] for t in terms])
    left = np.array([t[1] for t in terms])
    right = np.array([t[2] for t in terms])
    return SeparableEnsemble(w, left, right, ("C",), ("A", "B"), (2,), (2, 2))


def _permute_vector(v: np.ndarray, dims, labels, order) -> np.ndarray:
    perm = [labels.index(x) for x in order]
    return v.reshape(dims).transpose(perm).ravel()


# reports ---------------------------------------------------------------------


@dataclass
class ExampleReport:
    name: str
    params: dict
    records: list[VerificationRecord] = field(default_factory=list)
    values: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.status in ("certified", "supported") for r in self.records)

    def record(self, name: str) -> VerificationRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)


def _value_record(name, value, target, relation="eq", tol=1e-9, kind="formula", note=""):
    return make_record(name, Bracket.exact(value, kind), Bracket.exact(target, "formula"),
                       relation, tol, note)


def _carrier_ppt_records(s: ScenarioState, tag: str = "") -> list[VerificationRecord]:
    out = []
    for stage in ("alpha", "beta", "gamma"):
        rho = getattr(s, stage)
        if rho is None:
            continue
        m = ppt_check(rho, CUT_AB_C).min_eigenvalue
        out.append(_value_record(f"C:AB PT min eigenvalue >= 0 ({stage}{tag})", -m, 0.0, "le",
                                 tol=1e-9, kind="pt-spectrum"))
    return out


def _flag_measurement(gamma: DensityMatrix):
    p0, cond = project_subsystem(gamma, "C", _KET[0])
    fid = float(np.real(PHI_PLUS @ cond.data @ PHI_PLUS)) if cond is not None else 0.0
    return p0, cond, fid


def example2_run(params: Example2Params | float, opts: OptimizerOpts | None = None,
                 full: bool = True) -> tuple[ScenarioState, ExampleReport]:
    """Two-CNOT circuit on the Example-2 family; p = 1 is the original protocol.

    With ``full=False`` only the closed-form checks run (no discord or
    entanglement optimization).
    """
    if not isinstance(params, Example2Params):
        params = Example2Params(float(params))
    p = params.p
    alpha, _ = example2_states(params)
    s = run_scenario(alpha, CNOT_AC, CNOT_BC)
    cert = BoundReport(0.0, EXACT, Certificate("separable-ensemble", cubitt_carrier_ensemble(p)))
    ens = cubitt_carrier_ensemble(p).assemble(ABC)
    if np.max(np.abs(ens.data - s.beta.data)) > 1e-12:
        raise StateError("carrier ensemble does not reproduce the encoded state")
    s = s.with_certificate("beta", CUT_AB_C, cert)
    rep = ExampleReport("cubitt" if p == 1.0 else "example2", {"p": p})
    ev = ScenarioEvaluator(s, opts)

    diff = float(np.max(np.abs(s.gamma.data - example2_gamma_expected(p).data)))
    rep.records.append(_value_record("gamma matches closed form", diff, 0.0, "eq", 1e-12, "max-norm"))
    rep.records += _carrier_ppt_records(s)
    p0, _, fid = _flag_measurement(s.gamma)
    rep.values.update(outcome0_probability=p0, outcome0_fidelity=fid)
    rep.records.append(_value_record("P(C = 0) = 1/3", p0, 1.0 / 3.0, kind="projection"))
    rep.records.append(_value_record("fidelity with phi+ given C = 0", fid, 1.0, kind="projection"))

    e_final = ev.ree("gamma", CUT_A_CB)
    rep.values["E_final"] = e_final.value
    rep.records.append(make_record("E_final = 1/3", e_final, Bracket.exact(1.0 / 3.0), "eq", 1e-9))

    e_init = ev.ree("alpha", CUT_AC_B)
    rep.values["E_initial"] = e_init.value
    rep.records.append(make_record("E_initial <= (1-p)/3", e_init,
                                   Bracket.exact((1.0 - p) / 3.0, "formula"), "le"))
    if p < 1.0:
        m = ppt_check(alpha, CUT_AC_B).min_eigenvalue
        rep.values["alpha_AC_B_min_pt_eig"] = m
        rep.records.append(_value_record("alpha AC:B NPT", -m, 0.0, "gt", 0.0, "npt-witness"))
    if p == 1.0:
        rep.records.extend(check_distribution_conditions(s, evaluator=ev))
    else:
        rep.records.extend(check_distribution_conditions(s, evaluator=ev)[1:])
    if full:
        rep.records.append(verify_eq2(s, evaluator=ev))
        rep.records.extend(verify_eq6(s, evaluator=ev))
        rep.records.append(verify_theorem4(s, evaluator=ev))
    return s, rep


# example 3 -------------------------------------------------------------------


def example3_unitary(u: float) -> UnitaryOp:
    a, b = math.sqrt(u), math.sqrt(1.0 - u)
    m = np.array([[0, 0, 1, 0], [a, 0, 0, -b], [b, 0, 0, a], [0, 1, 0, 0]], dtype=float)
    return UnitaryOp(m, (2, 2), ("A", "C"))


def example3_s_range(u: float) -> tuple[float, float]:
    """Admissible window for s; raises when it is empty."""
    den = 1.0 - 4.0 * u * u
    if abs(den) < 1e-15:
        raise StateError("s window undefined at u = 1/2")
    lo = 4.0 * u * (1.0 - u) / den
    hi = (4.0 * u - 1.0) / (4.0 * u * u - 1.0)
    if u > 1.0 - math.sqrt(3.0) / 2.0 + 1e-15 or lo > hi + 1e-15:
        raise StateError(f"no admissible s for u = {u}: window [{lo:.6g}, {hi:.6g}] "
                         f"(needs u <= 1 - sqrt(3)/2)")
    return lo, hi


def example3_thresholds(u: float, s: float) -> dict:
    p = 1.0 / (1.0 + 4.0 * math.sqrt(s * (1.0 - s)))
    t0 = 1.0 / (1.0 + 8.0 * math.sqrt(s * u * (1.0 - s * u)))
    t1 = 1.0 / (1.0 + 8.0 * math.sqrt(u * (1.0 - s) * (1.0 - u * (1.0 - s))))
    return {"p": p, "alpha_threshold": p, "beta0_threshold": t0, "beta1_threshold": t1}


def _example3_alpha(p: float, s: float) -> DensityMatrix:
    psi = np.array([math.sqrt(s), 0.0, 0.0, math.sqrt(1.0 - s)])
    ab = p * np.outer(psi, psi) + (1.0 - p) * np.eye(4) / 4
    return DensityMatrix(np.kron(ab, np.eye(2) / 2), (2, 2, 2), ABC)


def example3_states(params: Example3Params) -> tuple[DensityMatrix, DensityMatrix, list[PureState]]:
    """(alpha, beta, [psi_0, psi_1]) for the uncorrelated-carrier example."""
    p, s = params.p, params.s
    alpha = _example3_alpha(p, s)
    u_ac = example3_unitary(params.u)
    beta = apply_unitary(alpha, u_ac)
    psi = np.array([math.sqrt(s), 0.0, 0.0, math.sqrt(1.0 - s)])
    psis = [apply_unitary_vector(PureState(np.kron(psi, _KET[j]), (2, 2, 2), ABC), u_ac) for j in (0, 1)]
    return alpha, beta, psis


def example3_run(params: Example3Params | None = None, opts: OptimizerOpts | None = None,
                 full: bool = True, u: float | None = None, s: float | None = None,
                 ) -> tuple[ScenarioState, ExampleReport]:
    """Uncorrelated mixed carrier with the parametrized AC encoding.

    The carrier certificate is the VT separability of both branches
    ``beta_j = p |psi_j><psi_j| + (1-p) I/8`` across C:AB.
    """
    if params is None:
        params = Example3Params(u if u is not None else 0.01, s)
    u, s, p = params.u, params.s, params.p
    alpha, beta, psis = example3_states(params)
    th = example3_thresholds(u, s)
    rep = ExampleReport("example3", {"u": u, "s": s, "p": p})
    rep.values.update(th)
    tol = 1e-12
    rep.records.append(_value_record("alpha A:B separable threshold", p, th["alpha_threshold"],
                                     "le", tol, "vt-threshold"))
    rep.records.append(_value_record("beta_0 AB:C separable threshold", p, th["beta0_threshold"],
                                     "le", tol, "vt-threshold"))
    rep.records.append(_value_record("beta_1 AB:C separable threshold", p, th["beta1_threshold"],
                                     "le", tol, "vt-threshold"))
    # the same thresholds from the Schmidt data of the branch states
    vt_ok = True
    for j, ps in enumerate(psis):
        fam = vt_threshold(ps, CUT_AB_C, p)
        rep.values[f"beta{j}_vt_pcr"] = fam.p_cr
        vt_ok &= p <= fam.p_cr + tol
        mix = vt_family_state(fam)
        if j == 0:
            acc = mix.data / 2
        else:
            acc = acc + mix.data / 2
    if np.max(np.abs(acc - beta.data)) > 1e-10:
        raise StateError("branch mixture does not reproduce the encoded state")
    s_state = run_scenario(alpha, example3_unitary(u))
    if vt_ok:
        s_state = s_state.with_certificate(
            "beta", CUT_AB_C, BoundReport(0.0, EXACT, Certificate("vt-mixture", (p, psis))))
    verdict = ppt_check(beta, CUT_A_CB)
    rep.values["A_BC_min_pt_eig"] = verdict.min_eigenvalue
    rep.records.append(_value_record("A:BC NPT", -verdict.min_eigenvalue, 0.0, "gt", 1e-9, "npt-witness"))
    rep.records += _carrier_ppt_records(s_state)
    if full:
        ev = ScenarioEvaluator(s_state, opts)
        rep.records.extend(check_distribution_conditions(s_state, evaluator=ev))
        if vt_ok and verdict.is_npt:
            rep.records.append(verify_theorem4(s_state, evaluator=ev))
            loc = localize(beta)
            rep.values["localized_probability"] = loc.outcome_probability
            rep.values["localized_min_pt_eig"] = loc.verdict.min_eigenvalue
            rep.records.append(_value_record("localized A:B NPT", -loc.verdict.min_eigenvalue, 0.0,
                                             "gt", 1e-9, "npt-witness"))
    return s_state, rep


def example3_sweep(us, s_mode: str = "lower") -> list[dict]:
    """Closed-form rows (no optimization) over a grid of u values."""
    rows = []
    for u in us:
        lo, hi = example3_s_range(u)
        s = lo if s_mode == "lower" else hi
        params = Example3Params(u, s)
        alpha, beta, _ = example3_states(params)
        th = example3_thresholds(u, s)
        row = {"u": u, "s": s, "p": params.p}
        row["beta0_ok"] = bool(th["p"] <= th["beta0_threshold"] + 1e-12)
        row["beta1_ok"] = bool(th["p"] <= th["beta1_threshold"] + 1e-12)
        for name, cut in (("A_BC", CUT_A_CB), ("AB_C", CUT_AB_C), ("AC_B", CUT_AC_B)):
            row[f"min_pt_{name}"] = ppt_check(beta, cut).min_eigenvalue
        rows.append(row)
    return rows


def npt_transition(rows: list[dict], tol: float = 1e-9) -> float | None:
    """First u (midpoint) where the A:BC partial transpose turns positive."""
    for a, b in zip(rows, rows[1:]):
        if a["min_pt_A_BC"] < -tol and b["min_pt_A_BC"] >= -tol:
            return 0.5 * (a["u"] + b["u"])
    return None


def example2_sweep(ps, opts: OptimizerOpts | None = None) -> list[dict]:
    rows = []
    for p in ps:
        s, rep = example2_run(Example2Params(p), opts, full=False)
        row = {"p": p, "E_final": rep.values["E_final"], "E_initial_upper": rep.values["E_initial"],
               "outcome0_probability": rep.values["outcome0_probability"]}
        for stage in ("alpha", "beta", "gamma"):
            row[f"min_pt_AB_C_{stage}"] = ppt_check(getattr(s, stage), CUT_AB_C).min_eigenvalue
        rows.append(row)
    return rows


# example 1 -------------------------------------------------------------------


def example1_build(psi_abc: PureState) -> tuple[ScenarioState, ExampleReport]:
    """Critical-admixture family built from an admissible tripartite pure state."""
    if tuple(psi_abc.labels) != ABC:
        raise StateError("example1_build expects labels (A, B, C)")
    adm = example1_admissible(psi_abc)
    if not adm.admissible:
        raise StateError(f"state not admissible: a1a2 = {adm.a1a2:.6g} <= M = {adm.M:.6g}")
    d_a, d_b, d_c = psi_abc.dims
    if d_b > d_a:
        raise StateError("encoding needs dim(B) <= dim(A)")
    d_tot = d_a * d_b * d_c
    ups = adm.Upsilon
    sd = schmidt(psi_abc, CutSpec({"B"}, {"A", "C"}))
    # right vectors are ordered (A, C)
    phi = np.zeros(d_a * d_b, dtype=complex)
    for i in range(d_b):
        phi += sd.coefficients[i] * np.kron(np.eye(d_a)[i], sd.left_vectors[:, i])
    cols = {i * d_c: sd.right_vectors[:, i] for i in range(d_b)}
    u = _complete_unitary(cols, d_a * d_c)
    u_ac = UnitaryOp(u, (d_a, d_c), ("A", "C"))
    c0 = np.eye(d_c)[0]
    alpha = DensityMatrix(ups * np.kron(np.outer(phi, phi.conj()), np.outer(c0, c0))
                          + (1 - ups) * np.eye(d_tot) / d_tot, psi_abc.dims, ABC, repair=True)
    s = run_scenario(alpha, u_ac)
    target = vt_family_state(vt_threshold(psi_abc, CUT_A_CB, ups))
    rep = ExampleReport("example1", {"Upsilon": ups})
    rep.values.update(a1a2=adm.a1a2, b1b2=adm.b1b2, c1c2=adm.c1c2, M=adm.M, Upsilon=ups)
    rep.records.append(_value_record("beta = rho_Upsilon", float(np.max(np.abs(s.beta.data - target.data))),
                                     0.0, "eq", 1e-10, "max-norm"))
    for lab in ("B", "C"):
        cut = CutSpec({lab}, set(ABC) - {lab})
        p_cr = vt_threshold(psi_abc, cut).p_cr
        rep.records.append(_value_record(f"{lab}:rest separable (Upsilon <= p_cr)", ups, p_cr, "le",
                                         1e-12, "vt-threshold"))
        s = s.with_certificate("beta", cut, BoundReport(0.0, EXACT, Certificate("vt-threshold", p_cr)))
    # alpha = U^dag rho_Upsilon U, so the AC:B certificate transfers
    s = s.with_certificate("alpha", CUT_AC_B, BoundReport(0.0, EXACT, Certificate("vt-threshold")))
    p_a = vt_threshold(psi_abc, CUT_A_CB).p_cr
    rep.records.append(_value_record("A:BC entangled (Upsilon > p_cr)", ups, p_a, "gt", 0.0, "vt-threshold"))
    rep.values["A_BC_min_pt_eig"] = ppt_check(s.beta, CUT_A_CB).min_eigenvalue
    deph = float(np.max(np.abs(_dephase_c(alpha).data - alpha.data)))
    rep.records.append(_value_record("alpha invariant under C dephasing", deph, 0.0, "eq", 1e-12, "max-norm"))
    return s, rep


def _dephase_c(rho: DensityMatrix) -> DensityMatrix:
    from .correlations import MeasurementBasis, dephase

    return dephase(rho, MeasurementBasis.computational("C", rho.dims[rho.index("C")]))


def _complete_unitary(columns: dict, d: int, tol: float = 1e-10) -> np.ndarray:
    """Unitary with the given orthonormal columns, completed by Gram-Schmidt."""
    u = np.zeros((d, d), dtype=complex)
    basis = []
    for k, v in columns.items():
        u[:, k] = v
        basis.append(v)
    free = [k for k in range(d) if k not in columns]
    for e in np.eye(d, dtype=complex):
        if not free:
            break
        v = e - sum((b.conj() @ e) * b for b in basis)
        nv = np.linalg.norm(v)
        if nv > tol:
            v = v / nv
            basis.append(v)
            u[:, free.pop(0)] = v
    return u
