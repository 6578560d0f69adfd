"""Entanglement distribution with a carrier, and the inequality verifiers.

Systems are labelled ``A`` (sender), ``B`` (receiver) and ``C`` (carrier).
Alice encodes on AC, C travels to Bob, Bob decodes on BC.

Verification records follow a direction algebra: ``lhs <= rhs`` is
*certified* only when the left value cannot underestimate the true left side
(exact or upper) and the right value cannot overestimate the true right side
(exact or lower). Anything else is at most *numerically supported*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .correlations import (
    EXACT,
    LOWER,
    UPPER,
    BoundReport,
    Certificate,
    MeasurementBasis,
    OptimizerOpts,
    REEEstimator,
    conditional_states,
    dephase,
    discord,
    ree_flag_eval,
    ree_lower_bound,
)
from .infotheory import conditional_entropy, mutual_information
from .qstate import (
    CutSpec,
    DensityMatrix,
    PureState,
    StateError,
    UnitaryOp,
    apply_unitary,
    eigh,
    partial_trace,
    permute_subsystems,
    project_subsystem,
)
from .sampling import random_unitary_matrix, random_vector
from .separability import PptVerdict, ppt_check, schmidt

ABC = ("A", "B", "C")
DEFAULT_TOL = 1e-8

CUT_A_CB = CutSpec({"A"}, {"B", "C"})
CUT_AC_B = CutSpec({"A", "C"}, {"B"})
CUT_AB_C = CutSpec({"A", "B"}, {"C"})
CUT_A_B = CutSpec({"A"}, {"B"})


def cut_key(cut: CutSpec) -> frozenset:
    return frozenset({cut.left, cut.right})


# bounds bookkeeping ---------------------------------------------------------


def _kind(*reports) -> str | None:
    kinds = [r.certificate_kind for r in reports if r.certificate_kind]
    return "+".join(kinds) if kinds else None


def _join(value, want, *reports) -> BoundReport:
    direction = EXACT if all(r.direction == EXACT for r in reports) else want
    kind = _kind(*reports)
    return BoundReport(float(value), direction, Certificate(kind) if kind else None,
                       float(sum(r.error_estimate for r in reports)))


@dataclass(frozen=True)
class Bracket:
    """An upper and a lower estimate of the same quantity."""

    upper: BoundReport
    lower: BoundReport

    @classmethod
    def of(cls, rep: BoundReport, lower: BoundReport | None = None) -> "Bracket":
        if rep.direction == EXACT:
            return cls(rep, rep)
        if rep.direction == LOWER:
            return cls(BoundReport(math.inf, UPPER), rep)
        if lower is None or lower.value > rep.value:
            lower = BoundReport(0.0, LOWER)
        return cls(rep, lower)

    @classmethod
    def exact(cls, value: float, kind: str | None = None) -> "Bracket":
        rep = BoundReport(float(value), EXACT, Certificate(kind) if kind else None)
        return cls(rep, rep)

    @property
    def is_exact(self) -> bool:
        return self.upper.direction == EXACT

    @property
    def value(self) -> float:
        return self.upper.value

    def __add__(self, other: "Bracket") -> "Bracket":
        return Bracket(_join(self.upper.value + other.upper.value, UPPER, self.upper, other.upper),
                       _join(self.lower.value + other.lower.value, LOWER, self.lower, other.lower))

    def __sub__(self, other: "Bracket") -> "Bracket":
        return Bracket(_join(self.upper.value - other.lower.value, UPPER, self.upper, other.lower),
                       _join(self.lower.value - other.upper.value, LOWER, self.lower, other.upper))

    def scale(self, c: float) -> "Bracket":
        if c < 0:
            raise ValueError("only nonnegative scaling keeps directions")
        return Bracket(replace(self.upper, value=c * self.upper.value),
                       replace(self.lower, value=c * self.lower.value))

    def absolute(self) -> "Bracket":
        hi = max(abs(self.upper.value), abs(self.lower.value))
        if self.lower.value >= 0:
            lo = self.lower.value
        elif self.upper.value <= 0:
            lo = -self.upper.value
        else:
            lo = 0.0
        return Bracket(_join(hi, UPPER, self.upper, self.lower),
                       _join(lo, LOWER, self.upper, self.lower))


@dataclass(frozen=True)
class VerificationRecord:
    """One inequality instance.

    ``status`` is one of ``certified`` (sound and holds), ``violated`` (sound
    and fails), ``supported`` (holds on the estimates but the directions do
    not entail it) or ``unsupported``.
    """

    name: str
    lhs: BoundReport
    rhs: BoundReport
    relation: str
    tol: float
    slack: float
    sound: bool
    passed: bool
    status: str
    note: str = ""

    @property
    def certificate_kind(self) -> str | None:
        return _kind(self.lhs, self.rhs)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs_value": self.lhs.value,
            "lhs_direction": self.lhs.direction,
            "rhs_value": self.rhs.value,
            "rhs_direction": self.rhs.direction,
            "slack": self.slack,
            "sound": self.sound,
            "pass": self.passed,
            "certificate_kind": self.certificate_kind,
            "relation": self.relation,
            "tol": self.tol,
            "status": self.status,
            "error_estimate": self.lhs.error_estimate + self.rhs.error_estimate,
            "note": self.note,
        }


def _directions_ok(lhs: BoundReport, rhs: BoundReport, relation: str) -> bool:
    if relation == "le":
        return lhs.direction in (EXACT, UPPER) and rhs.direction in (EXACT, LOWER)
    if relation == "gt":
        return lhs.direction in (EXACT, LOWER) and rhs.direction in (EXACT, UPPER)
    return lhs.direction == EXACT and rhs.direction == EXACT


def _holds(lv, rv, relation, tol) -> bool:
    if relation == "le":
        return lv <= rv + tol
    if relation == "gt":
        return lv > rv + tol
    return abs(lv - rv) <= tol


def _slack(lv, rv, relation) -> float:
    if relation == "le":
        return rv - lv
    if relation == "gt":
        return lv - rv
    return -abs(lv - rv)


def make_record(name: str, lhs: Bracket, rhs: Bracket, relation: str = "le",
                tol: float = DEFAULT_TOL, note: str = "") -> VerificationRecord:
    """Judge ``lhs <relation> rhs``; relation is ``le``, ``gt`` or ``eq``."""
    if relation == "le":
        sound_pair = (lhs.upper, rhs.lower)
    elif relation == "gt":
        sound_pair = (lhs.lower, rhs.upper)
    elif relation == "eq":
        sound_pair = (lhs.upper, rhs.upper)
    else:
        raise ValueError(f"unknown relation {relation!r}")
    lo, ro = sound_pair
    if _directions_ok(lo, ro, relation) and _holds(lo.value, ro.value, relation, tol):
        return VerificationRecord(name, lo, ro, relation, tol, _slack(lo.value, ro.value, relation),
                                  True, True, "certified", note)
    if _directions_ok(lo, ro, relation) and lo.direction == EXACT and ro.direction == EXACT:
        return VerificationRecord(name, lo, ro, relation, tol, _slack(lo.value, ro.value, relation),
                                  True, False, "violated", note)
    # point estimates: the best available value of each side
    le, re_ = lhs.upper, rhs.upper
    if relation == "gt":
        le = lhs.lower
    err = le.error_estimate + re_.error_estimate
    ok = _holds(le.value, re_.value, relation, tol + err) if math.isfinite(re_.value) else False
    return VerificationRecord(name, le, re_, relation, tol, _slack(le.value, re_.value, relation),
                              False, False, "supported" if ok else "unsupported", note)


# scenario -------------------------------------------------------------------


@dataclass(frozen=True)
class Dephasing:
    """Complete dephasing of one subsystem in the computational basis."""

    label: str


@dataclass(frozen=True)
class ScenarioState:
    alpha: DensityMatrix
    encoding: UnitaryOp | Dephasing | None
    beta: DensityMatrix
    decoding: UnitaryOp | None = None
    gamma: DensityMatrix | None = None
    certificates: dict = field(default_factory=dict)

    def stage(self, name: str) -> DensityMatrix:
        st = {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}[name]
        if st is None:
            raise StateError(f"scenario has no {name} stage")
        return st

    def with_certificate(self, stage: str, cut: CutSpec, report: BoundReport) -> "ScenarioState":
        certs = dict(self.certificates)
        certs[(stage, cut_key(cut))] = report
        return replace(self, certificates=certs)


def _apply(rho: DensityMatrix, op) -> DensityMatrix:
    if op is None:
        return rho
    if isinstance(op, Dephasing):
        d = rho.dims[rho.index(op.label)]
        return dephase(rho, MeasurementBasis.computational(op.label, d))
    return apply_unitary(rho, op)


def run_scenario(alpha: DensityMatrix, encoding=None, decoding: UnitaryOp | None = None,
                 certificates: dict | None = None) -> ScenarioState:
    if set(alpha.labels) != set(ABC):
        raise StateError(f"scenario needs subsystems A, B, C; got {alpha.labels}")
    if encoding is not None:
        acts = {encoding.label} if isinstance(encoding, Dephasing) else set(encoding.labels)
        if not acts <= {"A", "C"}:
            raise StateError("encoding must act on A and C only")
    if decoding is not None and not set(decoding.labels) <= {"B", "C"}:
        raise StateError("decoding must act on B and C only")
    beta = _apply(alpha, encoding)
    gamma = _apply(beta, decoding) if decoding is not None else None
    return ScenarioState(alpha, encoding, beta, decoding, gamma, dict(certificates or {}))


class ScenarioEvaluator:
    """Cached measure evaluation that exploits local-unitary invariance.

    A unitary encoding on AC leaves every AC:B quantity of alpha and beta
    equal; a unitary decoding on BC does the same for A:BC between beta
    and gamma. The best available evaluation over equivalent stages is used.
    """

    def __init__(self, scenario: ScenarioState, opts: OptimizerOpts | None = None):
        self.s = scenario
        self.opts = opts or OptimizerOpts()
        self._cache = {}

    def _equivalent(self, stage: str, cut: CutSpec) -> list[str]:
        """Stages sharing the value, most tractable first.

        The decoded state tends to carry classical flags, and the initial
        state is the simplest one before encoding.
        """
        key = cut_key(cut)
        group = {stage}
        if key == cut_key(CUT_AC_B) and isinstance(self.s.encoding, UnitaryOp) and stage in ("alpha", "beta"):
            group |= {"alpha", "beta"}
        if key == cut_key(CUT_A_CB) and self.s.decoding is not None and stage in ("beta", "gamma"):
            group |= {"beta", "gamma"}
        if self.s.encoding is None and stage in ("alpha", "beta"):
            group |= {"alpha", "beta"}
        order = ("gamma", "alpha", "beta") if key == cut_key(CUT_A_CB) else ("alpha", "beta", "gamma")
        return [x for x in order if x in group]

    def ree(self, stage: str, cut: CutSpec) -> Bracket:
        ck = ("ree", stage, cut_key(cut))
        if ck in self._cache:
            return self._cache[ck]
        stages = self._equivalent(stage, cut)
        for st in stages:
            cert = self.s.certificates.get((st, cut_key(cut)))
            if cert is not None:
                self._cache[ck] = Bracket.of(cert)
                return self._cache[ck]
        uppers, lowers = [], []
        for st in stages:
            rho = self.s.stage(st)
            rep = REEEstimator(cut=cut, restarts=self.opts.restarts, seed=self.opts.seed).fit(rho).report_
            uppers.append(rep)
            if rep.direction == EXACT:
                break
            lowers.append(ree_lower_bound(rho, cut))
        exact = [r for r in uppers if r.direction == EXACT]
        if exact:
            out = Bracket.of(exact[0])
        else:
            up = min(uppers, key=lambda r: r.value)
            lo = max(lowers, key=lambda r: r.value) if lowers else None
            out = Bracket.of(up, lo)
        self._cache[ck] = out
        return out

    def discord(self, stage: str, measured: str) -> Bracket:
        ck = ("discord", stage, measured)
        if ck not in self._cache:
            self._cache[ck] = discord_bracket(self.s.stage(stage), measured, self.opts)
        return self._cache[ck]


def discord_bracket(rho: DensityMatrix, measured: str, opts: OptimizerOpts | None = None) -> Bracket:
    """Discord upper bound with the entanglement lower bound beneath it."""
    rep = discord(rho, measured, opts)
    if rep.direction == EXACT:
        return Bracket.of(rep)
    cut = CutSpec(set(rho.labels) - {measured}, {measured})
    return Bracket.of(rep, ree_lower_bound(rho, cut))


def ree_bracket(rho: DensityMatrix, cut: CutSpec, opts: OptimizerOpts | None = None,
                use_flags: bool = True) -> Bracket:
    opts = opts or OptimizerOpts()
    rep = REEEstimator(cut=cut, restarts=opts.restarts, seed=opts.seed,
                       use_flags=use_flags).fit(rho).report_
    return Bracket.of(rep, None if rep.direction == EXACT else ree_lower_bound(rho, cut))


# distribution conditions -------------------------------------------------------


def _npt_record(name: str, rho: DensityMatrix, cut: CutSpec, lower: Bracket) -> VerificationRecord:
    verdict = ppt_check(rho, cut)
    zero = Bracket.exact(0.0)
    if verdict.is_npt:
        lhs = Bracket.exact(-verdict.min_eigenvalue, "npt-witness")
        return make_record(name, lhs, zero, "gt", tol=0.0,
                           note="negated minimal partial-transpose eigenvalue; positive implies entanglement")
    if verdict.exact_criterion:
        return make_record(name, Bracket.exact(0.0, "ppt-exact"), zero, "gt", tol=0.0,
                           note="PPT on a 2x2 or 2x3 cut certifies separability")
    return make_record(name, lower, zero, "gt", tol=0.0, note="PPT on a larger cut; lower bound only")


def check_distribution_conditions(s: ScenarioState, opts: OptimizerOpts | None = None,
                                  evaluator: ScenarioEvaluator | None = None) -> list[VerificationRecord]:
    """No initial B:AC entanglement, separable carrier, and A:BC entanglement after encoding."""
    ev = evaluator or ScenarioEvaluator(s, opts)
    zero = Bracket.exact(0.0)
    r_a = make_record("E_B:AC(alpha) = 0", ev.ree("alpha", CUT_AC_B), zero, "le")
    r_b = make_record("E_C:AB(beta) = 0", ev.ree("beta", CUT_AB_C), zero, "le")
    lower = Bracket.of(BoundReport(math.inf, UPPER), ree_lower_bound(s.beta, CUT_A_CB))
    r_c = _npt_record("E_A:BC(beta) > 0", s.beta, CUT_A_CB, lower)
    return [r_a, r_b, r_c]


# localization -------------------------------------------------------------------


@dataclass(frozen=True)
class LocalizationResult:
    localizing_unitary: UnitaryOp
    outcome_probability: float
    conditional_ab: DensityMatrix
    verdict: PptVerdict
    transformed: DensityMatrix


def _gram_schmidt_complete(first: list[np.ndarray], d: int, tol: float = 1e-10) -> list[np.ndarray]:
    basis = [v / np.linalg.norm(v) for v in first]
    for e in np.eye(d, dtype=complex):
        if len(basis) == d:
            break
        v = e - sum((b.conj() @ e) * b for b in basis)
        nv = np.linalg.norm(v)
        if nv > tol:
            basis.append(v / nv)
    return basis


def localize(beta: DensityMatrix) -> LocalizationResult:
    """Move A:BC entanglement onto A:B with a BC unitary and post-selection on C.

    The witness is the eigenvector of the most negative eigenvalue of the
    A-partial transpose. Its Schmidt vectors on BC are rotated onto
    |j>_B |0>_C, C is measured in the computational basis and outcome 0 kept.
    """
    beta = permute_subsystems(beta, ABC)
    d_a, d_b, d_c = beta.dims
    if d_b < d_a:
        raise StateError("localization needs dim(B) >= dim(A)")
    verdict = ppt_check(beta, CUT_A_CB)
    if not verdict.is_npt:
        raise StateError("state has positive partial transpose across A:BC")
    psi = PureState.normalized(verdict.witness_vector, beta.dims, ABC)
    sd = schmidt(psi, CUT_A_CB)
    # right vectors live on (B, C) in that order
    rank = sd.rank
    targets = []
    for j in range(rank):
        t = np.zeros(d_b * d_c, dtype=complex)
        t[j * d_c + 0] = 1.0
        targets.append(t)
    sources = [sd.right_vectors[:, j] for j in range(rank)]
    src = _gram_schmidt_complete(sources, d_b * d_c)
    dst = _gram_schmidt_complete(targets, d_b * d_c)
    u = sum(np.outer(t, s.conj()) for t, s in zip(dst, src))
    u_bc = UnitaryOp(u, (d_b, d_c), ("B", "C"))
    bar = apply_unitary(beta, u_bc)
    zero = np.zeros(d_c)
    zero[0] = 1.0
    p0, cond = project_subsystem(bar, "C", zero)
    if cond is None:
        raise StateError("post-selected outcome has vanishing probability")
    v = ppt_check(cond, CUT_A_B)
    return LocalizationResult(u_bc, p0, cond, v, bar)


def localized_lower_bound(res: LocalizationResult) -> BoundReport:
    """Lower bound on E_A:BC from the post-selected branch alone."""
    lb = ree_lower_bound(res.conditional_ab, CUT_A_B)
    return BoundReport(res.outcome_probability * lb.value, LOWER, Certificate("localization"))


# verifiers ----------------------------------------------------------------------


def _as_abc(rho: DensityMatrix) -> DensityMatrix:
    if set(rho.labels) != set(ABC):
        raise StateError(f"expected subsystems A, B, C; got {rho.labels}")
    return permute_subsystems(rho, ABC)


def verify_theorem1(rho: DensityMatrix, opts: OptimizerOpts | None = None) -> VerificationRecord:
    """|E_A:CB - E_AC:B| <= D_AB|C."""
    rho = _as_abc(rho)
    e1 = ree_bracket(rho, CUT_A_CB, opts)
    e2 = ree_bracket(rho, CUT_AC_B, opts)
    d = discord_bracket(rho, "C", opts)
    return make_record("|E_A:CB - E_AC:B| <= D_AB|C", (e1 - e2).absolute(), d, "le")


def verify_eq2(s: ScenarioState, opts: OptimizerOpts | None = None,
               evaluator: ScenarioEvaluator | None = None) -> VerificationRecord:
    """E_A:CB(beta) <= E_AC:B(alpha) + D_AB|C(beta)."""
    ev = evaluator or ScenarioEvaluator(s, opts)
    lhs = ev.ree("beta", CUT_A_CB)
    rhs = ev.ree("alpha", CUT_AC_B) + ev.discord("beta", "C")
    return make_record("E_A:CB(beta) <= E_AC:B(alpha) + D_AB|C(beta)", lhs, rhs, "le")


def verify_eq6(s: ScenarioState, opts: OptimizerOpts | None = None,
               evaluator: ScenarioEvaluator | None = None) -> list[VerificationRecord]:
    """E_A:CB(beta) <= E_AB:C(beta) + D_AC|B(alpha), plus the separable-carrier corollary."""
    ev = evaluator or ScenarioEvaluator(s, opts)
    lhs = ev.ree("beta", CUT_A_CB)
    e_c = ev.ree("beta", CUT_AB_C)
    d_b = ev.discord("alpha", "B")
    out = [make_record("E_A:CB(beta) <= E_AB:C(beta) + D_AC|B(alpha)", lhs, e_c + d_b, "le")]
    if e_c.is_exact and e_c.value <= DEFAULT_TOL:
        out.append(make_record("E_A:BC(beta) <= D_AC|B(alpha)", lhs, d_b, "le"))
    return out


def purification(rho_ac: DensityMatrix) -> PureState:
    """Canonical purification sum_i sqrt(l_i) |e_i>_AC |i>_B, returned in A, B, C order."""
    rho_ac = permute_subsystems(rho_ac, ("A", "C"))
    w, v = eigh(rho_ac.data)
    keep = w > 1e-14
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    d_b = max(2, w.size)
    d_a, d_c = rho_ac.dims
    vec = np.zeros((d_a * d_c, d_b), dtype=complex)
    for i in range(w.size):
        vec[:, i] = math.sqrt(w[i]) * v[:, i]
    t = vec.reshape(d_a, d_c, d_b).transpose(0, 2, 1)
    return PureState.normalized(t.ravel(), (d_a, d_b, d_c), ABC)


def verify_eq4_pure(rho_ac: DensityMatrix, tol: float = DEFAULT_TOL) -> list[VerificationRecord]:
    """E_A:CB - E_AC:B = S_C|B = -S_C|A on the purification of rho_AC."""
    phi = purification(rho_ac).projector()
    e1 = ree_bracket(phi, CUT_A_CB)
    e2 = ree_bracket(phi, CUT_AC_B)
    minus_s_ca = Bracket.exact(-conditional_entropy(rho_ac, {"C"}, {"A"}), "entropy")
    s_cb = Bracket.exact(conditional_entropy(phi, {"C"}, {"B"}), "entropy")
    return [
        make_record("E_A:CB - E_AC:B = -S_C|A", e1 - e2, minus_s_ca, "eq", tol),
        make_record("S_C|B = -S_C|A", s_cb, minus_s_ca, "eq", tol),
    ]


def verify_lemma1(rho: DensityMatrix, opts: OptimizerOpts | None = None,
                  check_flags: bool = True) -> list[VerificationRecord]:
    """E_A:CB <= D_AB|C + sum_i p_i E_A:B(rho_i) with the optimal measurement on C."""
    opts = opts or OptimizerOpts()
    rho = _as_abc(rho)
    d_rep = discord(rho, "C", opts)
    basis = d_rep.certificate.payload
    total = Bracket.exact(0.0)
    for p, cond in conditional_states(rho, basis):
        if cond is None:
            continue
        total = total + ree_bracket(cond, CUT_A_B, opts).scale(p)
    d = Bracket.of(d_rep, ree_lower_bound(rho, CutSpec({"A", "B"}, {"C"})))
    lhs = ree_bracket(rho, CUT_A_CB, opts)
    out = [make_record("E_A:CB <= D_AB|C + sum_i p_i E_A:B(rho_i)", lhs, d + total, "le")]
    if check_flags:
        deph = dephase(rho, basis)
        est = REEEstimator(cut=CUT_A_CB, restarts=opts.restarts, seed=opts.seed)
        for cut, label in ((CUT_A_CB, "A:CB"), (CUT_AC_B, "AC:B")):
            flag = ree_flag_eval(deph, "C", cut, basis=basis, estimator=est.set_params(cut=cut))
            out.append(make_record(f"E_{label}(Pi(rho)) = sum_i p_i E_A:B(rho_i)",
                                   Bracket.of(flag), total, "eq", 1e-6))
    return out


def scenario_gain(s: ScenarioState, opts: OptimizerOpts | None = None,
                  evaluator: ScenarioEvaluator | None = None) -> Bracket:
    ev = evaluator or ScenarioEvaluator(s, opts)
    after = ev.ree("beta", CUT_A_CB)
    if not after.is_exact and s.decoding is not None:
        # post-selected branch gives a direct lower bound after decoding
        try:
            lb = localized_lower_bound(localize(s.beta))
            if lb.value > after.lower.value:
                after = Bracket(after.upper, lb)
        except StateError:
            pass
    return after - ev.ree("alpha", CUT_AC_B)


def verify_theorem4(s: ScenarioState, opts: OptimizerOpts | None = None,
                    evaluator: ScenarioEvaluator | None = None) -> VerificationRecord:
    """Entanglement gain through an AB:C-separable beta stays below (1 - 1/d_tot^2) log2 d."""
    ev = evaluator or ScenarioEvaluator(s, opts)
    sep = ev.ree("beta", CUT_AB_C)
    if not (sep.is_exact and sep.value <= DEFAULT_TOL):
        raise StateError("theorem-4 bound needs beta certified separable across AB:C")
    d = s.beta.dims[s.beta.index("C")]
    d_tot = s.beta.dim
    bound = Bracket.exact((1.0 - 1.0 / d_tot ** 2) * math.log2(d), "formula")
    return make_record("E_A:CB(beta) - E_AC:B(alpha) <= (1 - 1/d_tot^2) log2 d",
                       scenario_gain(s, opts, ev), bound, "le")


def verify_minfo_chain(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> VerificationRecord:
    """I_A:CB - I_AC:B <= I_AB:C."""
    rho = _as_abc(rho)
    lhs = Bracket.exact(mutual_information(rho, CUT_A_CB) - mutual_information(rho, CUT_AC_B), "entropy")
    rhs = Bracket.exact(mutual_information(rho, CUT_AB_C), "entropy")
    return make_record("I_A:CB - I_AC:B <= I_AB:C", lhs, rhs, "le", tol)


def verify_araki_lieb(rho: DensityMatrix, tol: float = DEFAULT_TOL) -> VerificationRecord:
    """|S_A - S_B| <= S_AB."""
    from .infotheory import von_neumann_entropy as S

    rho = _as_abc(rho)
    sa, sb = S(partial_trace(rho, {"A"})), S(partial_trace(rho, {"B"}))
    sab = S(partial_trace(rho, {"A", "B"}))
    return make_record("|S_A - S_B| <= S_AB", Bracket.exact(abs(sa - sb), "entropy"),
                       Bracket.exact(sab, "entropy"), "le", tol)


# theorem-3 falsification search ------------------------------------------------------


ENCODING_FAMILIES = ("haar", "weak", "controlled", "aligned")


@dataclass
class Theorem3Report:
    trials: int
    seed: int
    carrier_ppt: int = 0
    npt_a_bc: int = 0
    candidates: list = field(default_factory=list)
    by_family: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"trials": self.trials, "seed": self.seed, "carrier_ppt": self.carrier_ppt,
                "npt_a_bc": self.npt_a_bc, "candidates": self.candidates,
                "by_family": self.by_family}


def _controlled(rng, control: np.ndarray) -> np.ndarray:
    v = [random_unitary_matrix(rng, 2) for _ in range(2)]
    return sum(np.kron(np.outer(control[:, a], control[:, a].conj()), v[a]) for a in range(2))


def _encoding(rng, family: str, a_basis: np.ndarray) -> np.ndarray:
    if family == "haar":
        return random_unitary_matrix(rng, 4)
    if family == "weak":
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (h + h.conj().T) / 2
        h /= np.linalg.norm(h, 2)
        loc = np.kron(random_unitary_matrix(rng, 2), random_unitary_matrix(rng, 2))
        return loc @ expm(-0.3j * rng.random() * h)
    if family == "controlled":
        return _controlled(rng, random_unitary_matrix(rng, 2))
    if family == "aligned":
        return _controlled(rng, a_basis)
    raise ValueError(f"unknown encoding family {family!r}")


def _theorem3_instance(rng, d_b: int, classical_b: bool, family: str) -> DensityMatrix:
    p = rng.dirichlet(np.ones(2))
    a_basis = np.eye(2, dtype=complex) if classical_b else random_unitary_matrix(rng, 2)
    conds = []
    for _ in range(2):
        if classical_b:
            conds.append(np.diag(rng.dirichlet(np.ones(d_b))))
            continue
        g = rng.normal(size=(d_b, d_b)) + 1j * rng.normal(size=(d_b, d_b))
        m = g @ g.conj().T
        conds.append(m / np.trace(m).real)
    c = random_vector(rng, 2)
    alpha_ab = sum(p[a] * np.kron(np.outer(a_basis[:, a], a_basis[:, a].conj()), conds[a])
                   for a in range(2))
    alpha = DensityMatrix(np.kron(alpha_ab, np.outer(c, c.conj())), (2, d_b, 2), ABC, repair=True)
    u = UnitaryOp(_encoding(rng, family, a_basis), (2, 2), ("A", "C"))
    return apply_unitary(alpha, u)


def theorem3_search(trials: int, seed: int = 42, d_b: int = 2,
                    classical_b: bool = False) -> Theorem3Report:
    """Randomized search for separable-carrier entanglement creation from A-classical inputs.

    Inputs are ``sum_a p_a |a><a| (x) alpha_B|a (x) |c><c|`` with orthonormal
    ``|a>`` and pure ``|c>``. Encodings cycle through four families: Haar,
    weakly entangling, controlled on a random basis of A, and controlled on
    the classical basis of A. Haar-random encodings essentially never leave
    a pure carrier separable, so the last family is what exercises the
    separable-carrier regime.

    A candidate is an instance whose beta is PPT across C:AB yet NPT across
    A:BC. C:AB is a 2 x 2d_B cut, so candidates need manual inspection
    rather than counting as counterexamples outright.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rep = Theorem3Report(trials, seed)
    rep.by_family = {f: {"trials": 0, "carrier_ppt": 0, "npt_a_bc": 0} for f in ENCODING_FAMILIES}
    for i in range(trials):
        family = ENCODING_FAMILIES[i % len(ENCODING_FAMILIES)]
        rng = np.random.default_rng([seed, i])
        beta = _theorem3_instance(rng, d_b, classical_b, family)
        carrier = ppt_check(beta, CUT_AB_C)
        target = ppt_check(beta, CUT_A_CB)
        fam = rep.by_family[family]
        fam["trials"] += 1
        fam["carrier_ppt"] += int(not carrier.is_npt)
        fam["npt_a_bc"] += int(target.is_npt)
        rep.carrier_ppt += int(not carrier.is_npt)
        rep.npt_a_bc += int(target.is_npt)
        if not carrier.is_npt and target.is_npt:
            rep.candidates.append({"index": i, "family": family,
                                   "carrier_min_eig": carrier.min_eigenvalue,
                                   "a_bc_min_eig": target.min_eigenvalue})
    return rep


# random sweeps ---------------------------------------------------------------


def locc_step_scenario(rng) -> ScenarioState:
    """C holds a classical register that Alice's local unitary on A is conditioned on.

    Beta is quantum-classical on C, so the communicated discord vanishes.
    """
    r = rng.dirichlet(np.ones(2))
    blocks = []
    for j in range(2):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = g @ g.conj().T
        blocks.append(np.kron(m / np.trace(m).real, np.diag(np.eye(2)[j])) * r[j])
    alpha = permute_subsystems(DensityMatrix(sum(blocks), (2, 2, 2), ("A", "B", "C"), repair=True), ABC)
    u = sum(np.kron(random_unitary_matrix(rng, 2), np.diag(np.eye(2)[j])) for j in range(2))
    return run_scenario(alpha, UnitaryOp(u, (2, 2), ("A", "C")))


def b_classical_scenario(rng) -> ScenarioState:
    """B carries a classical register; the encoding is a Haar unitary on AC."""
    r = rng.dirichlet(np.ones(2))
    m = np.zeros((8, 8), dtype=complex)
    for i in range(2):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        s_ac = g @ g.conj().T
        s_ac /= np.trace(s_ac).real
        # (A, C) block placed around B = |i>
        t = np.einsum("acxz,by->abcxyz", s_ac.reshape(2, 2, 2, 2), np.diag(np.eye(2)[i]))
        m += r[i] * t.reshape(8, 8)
    alpha = DensityMatrix(m, (2, 2, 2), ABC, repair=True)
    return run_scenario(alpha, UnitaryOp(random_unitary_matrix(rng, 4), (2, 2), ("A", "C")))


SUITES = ("theorem1", "eq2", "eq4", "eq6", "eq7", "lemma1", "theorem3", "theorem4")
DEFAULT_N = {"theorem1": 500, "eq2": 100, "eq4": 200, "eq6": 50, "eq7": 500,
             "lemma1": 10, "theorem4": 10}


def sweep(suite: str, n: int | None = None, seed: int = 42,
          opts: OptimizerOpts | None = None, trials: int | None = None):
    """Yield ``(index, record)`` pairs for a verifier over seeded random instances.

    Instance ``i`` draws from ``np.random.default_rng([seed, i])`` so any
    single instance can be regenerated on its own.
    """
    from .examples import Example2Params, Example3Params, example2_run, example3_run, example3_s_range
    from .sampling import random_mixed, random_pure, random_two_qubit

    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    opts = opts or OptimizerOpts(seed=seed)
    if suite == "theorem3":
        rep = theorem3_search(trials or n or 1000, seed)
        zero = Bracket.exact(0.0)
        rec = make_record("theorem-3 candidates = 0", Bracket.exact(len(rep.candidates), "search"),
                          zero, "eq", 0.0,
                          note=f"carrier_ppt={rep.carrier_ppt} npt_a_bc={rep.npt_a_bc}")
        yield 0, rec
        return
    n = n if n is not None else DEFAULT_N[suite]
    if n < 1:
        raise ValueError("n must be at least 1")
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        if suite == "theorem1":
            rho = random_pure(rng).projector()
            yield i, verify_theorem1(rho, opts)
        elif suite == "eq2":
            yield i, verify_eq2(locc_step_scenario(rng), opts)
        elif suite == "eq4":
            for rec in verify_eq4_pure(random_two_qubit(rng)):
                yield i, rec
        elif suite == "eq6":
            for rec in verify_eq6(b_classical_scenario(rng), opts):
                yield i, rec
        elif suite == "eq7":
            yield i, verify_minfo_chain(random_mixed(rng))
        elif suite == "lemma1":
            for rec in verify_lemma1(random_mixed(rng), opts):
                yield i, rec
        elif suite == "theorem4":
            if i % 2 == 0:
                s, _ = example2_run(Example2Params(float(rng.random())), opts, full=False)
            else:
                u = float(rng.uniform(0.001, 0.02))
                lo, _ = example3_s_range(u)
                s, _ = example3_run(Example3Params(u, lo), opts, full=False)
            yield i, verify_theorem4(s, opts)
