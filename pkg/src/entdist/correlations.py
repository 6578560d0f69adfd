"""Relative entropy of discord and of entanglement.

Every measure comes back as a :class:`BoundReport` whose ``direction`` says
whether the number is exact or only a one-sided bound. Numerical minimizers
can only ever produce upper bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize
from sklearn.base import BaseEstimator

from ._validation import check_cut, check_label, check_state
from .infotheory import (
    coherent_information,
    entropy_of_spectrum,
    relative_entropy,
    von_neumann_entropy,
)
from .qstate import (
    CapabilityError,
    CutSpec,
    DensityMatrix,
    StateError,
    eigh,
    eigvalsh,
    partial_trace,
    permute_subsystems,
    project_subsystem,
)
from .separability import ppt_check

EXACT, UPPER, LOWER = "exact", "upper", "lower"
DIRECTIONS = (EXACT, UPPER, LOWER)
REE_MAX_DIM = 16
CLASSICAL_TOL = 1e-9
PURE_TOL = 1e-10
DEGENERACY_GAP = 1e-6
_LN2 = math.log(2.0)
ZERO_STOP = 1e-10
CONSENSUS = 4
CONSENSUS_TOL = 1e-9


@dataclass(frozen=True)
class OptimizerOpts:
    seed: int = 42
    restarts: int = 32
    grid: int = 64
    tol: float = 1e-9
    max_iter: int = 500


@dataclass(frozen=True)
class Certificate:
    kind: str
    payload: Any = None


@dataclass(frozen=True)
class BoundReport:
    value: float
    direction: str
    certificate: Certificate | None = None
    error_estimate: float = 0.0

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")

    @property
    def certificate_kind(self) -> str | None:
        return None if self.certificate is None else self.certificate.kind


@dataclass(frozen=True)
class MeasurementBasis:
    """Rank-1 complete projective measurement given by orthonormal columns."""

    subsystem: str
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        d = v.shape[0]
        if v.shape != (d, d) or np.max(np.abs(v.conj().T @ v - np.eye(d))) > 1e-9:
            raise StateError("measurement vectors must form an orthonormal basis")
        object.__setattr__(self, "vectors", v)

    @property
    def projectors(self) -> list[np.ndarray]:
        return [np.outer(c, c.conj()) for c in self.vectors.T]

    @classmethod
    def computational(cls, subsystem: str, d: int) -> "MeasurementBasis":
        return cls(subsystem, np.eye(d, dtype=complex))

    @classmethod
    def from_angles(cls, subsystem: str, theta: float, phi: float) -> "MeasurementBasis":
        return cls(subsystem, _qubit_basis(theta, phi))


def _qubit_basis(theta, phi) -> np.ndarray:
    c, s, e = np.cos(theta), np.sin(theta), np.exp(1j * phi)
    return np.array([[c, -np.conj(e) * s], [e * s, c]], dtype=complex)


@dataclass(frozen=True)
class SeparableEnsemble:
    """Mixture of product pure states across a cut.

    ``left`` holds one row per component over the left labels (in order),
    ``right`` likewise.
    """

    weights: np.ndarray
    left: np.ndarray
    right: np.ndarray
    left_labels: tuple
    right_labels: tuple
    left_dims: tuple
    right_dims: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < -1e-15) or abs(w.sum() - 1.0) > 1e-9:
            raise StateError("ensemble weights must be a probability vector")
        if self.left.shape[0] != w.size or self.right.shape[0] != w.size:
            raise StateError("ensemble components and weights differ in count")

    def matrix(self) -> np.ndarray:
        """Mixture over the (left, right) tensor order."""
        k = self.weights.size
        v = (self.left[:, :, None] * self.right[:, None, :]).reshape(k, -1)
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        return (v.T * self.weights) @ v.conj()

    def assemble(self, labels=None) -> DensityMatrix:
        rho = DensityMatrix(self.matrix(), self.left_dims + self.right_dims,
                            self.left_labels + self.right_labels, repair=True)
        return rho if labels is None else permute_subsystems(rho, labels)


# dephasing ----------------------------------------------------------------


def _split_measured(rho: DensityMatrix, label: str) -> np.ndarray:
    """Reshape to (rest, y, rest, y) with the measured factor last."""
    i = rho.index(label)
    n = len(rho.dims)
    t = rho.data.reshape(rho.dims + rho.dims)
    t = np.moveaxis(t, (i, n + i), (n - 1, 2 * n - 1))
    d = rho.dims[i]
    rest = rho.dim // d
    return t.reshape(rest, d, rest, d)


def _conditional_blocks(t: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Unnormalized post-measurement blocks <b_j| rho |b_j>, batched over bases."""
    if vectors.ndim == 2:
        return np.einsum("ij,aibk,kj->jab", vectors.conj(), t, vectors)
    return np.einsum("gij,aibk,gkj->gjab", vectors.conj(), t, vectors)


def dephase(rho: DensityMatrix, basis: MeasurementBasis) -> DensityMatrix:
    i = rho.index(basis.subsystem)
    if basis.vectors.shape[0] != rho.dims[i]:
        raise StateError("measurement basis dimension does not match the subsystem")
    out = np.zeros_like(rho.data)
    for proj in basis.projectors:
        # I (x) P (x) I with P in slot i
        ops = [np.eye(d) for d in rho.dims]
        ops[i] = proj
        full = ops[0]
        for op in ops[1:]:
            full = np.kron(full, op)
        out += full @ rho.data @ full
    return DensityMatrix(out, rho.dims, rho.labels, repair=True)


def dephased_entropy(rho: DensityMatrix, basis: MeasurementBasis) -> float:
    blocks = _conditional_blocks(_split_measured(rho, basis.subsystem), basis.vectors)
    return entropy_of_spectrum(eigvalsh(blocks).ravel())


def conditional_states(rho: DensityMatrix, basis: MeasurementBasis):
    """Outcome probabilities and conditional states of the unmeasured part."""
    out = []
    for vec in basis.vectors.T:
        p, cond = project_subsystem(rho, basis.subsystem, vec)
        out.append((p, cond))
    return out


def _is_invariant(rho: DensityMatrix, basis: MeasurementBasis, tol=CLASSICAL_TOL) -> bool:
    t = _split_measured(rho, basis.subsystem)
    b = basis.vectors
    # coefficients in the measured basis: (b^dag) t (b)
    c = np.einsum("ij,aibk,kl->ajbl", b.conj(), t, b)
    d = b.shape[0]
    off = c.copy()
    for j in range(d):
        off[:, j, :, j] = 0.0
    return bool(np.max(np.abs(off)) <= tol)


def classical_basis(rho: DensityMatrix, label: str) -> MeasurementBasis | None:
    """A basis on ``label`` that leaves ``rho`` unchanged, if one is found.

    Tries the computational basis, then the eigenbasis of the marginal when
    its spectrum is nondegenerate.
    """
    d = rho.dims[rho.index(label)]
    cand = MeasurementBasis.computational(label, d)
    if _is_invariant(rho, cand):
        return cand
    w, v = eigh(partial_trace(rho, {label}).data)
    if np.min(np.diff(w)) > DEGENERACY_GAP:
        cand = MeasurementBasis(label, v)
        if _is_invariant(rho, cand):
            return cand
    return None


# discord ------------------------------------------------------------------


class DiscordEstimator(BaseEstimator):
    """Relative entropy of discord with a projective measurement on one subsystem.

    Parameters
    ----------
    measured : str
        Label of the measured subsystem.
    grid : int
        Points per angle of the seed grid (qubit case).
    tol : float
        Simplex contraction tolerance.
    max_iter : int
        Simplex iteration cap.
    seed : int
        Seed for the random restarts used when the measured dimension exceeds 2.
    restarts : int
        Number of restarts in that case.

    Attributes
    ----------
    report_ : BoundReport
    basis_ : MeasurementBasis
    value_ : float
    """

    def __init__(self, measured="C", grid=64, tol=1e-9, max_iter=500, seed=42, restarts=32):
        self.measured = measured
        self.grid = grid
        self.tol = tol
        self.max_iter = max_iter
        self.seed = seed
        self.restarts = restarts

    def fit(self, X, y=None):
        rho = check_state(X)
        label = check_label(self.measured, rho)
        self.report_ = self._solve(rho, label)
        self.basis_ = self.report_.certificate.payload
        self.value_ = self.report_.value
        return self

    def _solve(self, rho: DensityMatrix, label: str) -> BoundReport:
        d = rho.dims[rho.index(label)]
        s = von_neumann_entropy(rho)
        marginal = partial_trace(rho, {label})
        if rho.is_pure(PURE_TOL):
            _, v = eigh(marginal.data)
            basis = MeasurementBasis(label, v)
            return BoundReport(von_neumann_entropy(marginal), EXACT,
                               Certificate("measurement-basis", basis))
        basis = classical_basis(rho, label)
        if basis is not None:
            return BoundReport(0.0, EXACT, Certificate("measurement-basis", basis))
        if d == 2:
            basis, err = self._qubit_search(rho, label)
        else:
            basis, err = self._unitary_search(rho, label, d)
        value = max(dephased_entropy(rho, basis) - s, 0.0)
        return BoundReport(value, UPPER, Certificate("measurement-basis", basis), err)

    def _qubit_search(self, rho, label):
        t = _split_measured(rho, label)
        theta = np.linspace(0.0, np.pi / 2, self.grid)
        phi = np.linspace(0.0, 2 * np.pi, self.grid, endpoint=False)
        th, ph = np.meshgrid(theta, phi, indexing="ij")
        th, ph = th.ravel(), ph.ravel()
        c, s, e = np.cos(th), np.sin(th), np.exp(1j * ph)
        bases = np.empty((th.size, 2, 2), dtype=complex)
        bases[:, 0, 0], bases[:, 0, 1] = c, -np.conj(e) * s
        bases[:, 1, 0], bases[:, 1, 1] = e * s, c
        w = eigvalsh(_conditional_blocks(t, bases)).reshape(th.size, -1)
        w = np.where(w > 1e-12, w, 1.0)
        vals = -np.sum(w * np.log2(w), axis=1)
        grid_best = float(vals.min())

        def f(x):
            b = _qubit_basis(x[0], x[1])
            return entropy_of_spectrum(eigvalsh(_conditional_blocks(t, b)).ravel())

        best_x, best_f = None, np.inf
        # refine the few best grid points; ties resolved by grid order
        for idx in np.argsort(vals, kind="stable")[:4]:
            x0 = np.array([th[idx], ph[idx]])
            res = minimize(f, x0, method="Nelder-Mead",
                           options={"xatol": self.tol, "fatol": self.tol,
                                    "maxiter": self.max_iter})
            if res.fun < best_f - 1e-15:
                best_x, best_f = res.x, float(res.fun)
        if best_f > grid_best:
            idx = int(np.argmin(vals))
            best_x, best_f = np.array([th[idx], ph[idx]]), grid_best
        basis = MeasurementBasis.from_angles(label, best_x[0], best_x[1])
        return basis, max(grid_best - best_f, 0.0)

    def _unitary_search(self, rho, label, d):
        """Best effort: exp(iH) parametrization with random restarts."""
        t = _split_measured(rho, label)
        iu = np.triu_indices(d, 1)

        def unitary(x):
            h = np.diag(x[:d]).astype(complex)
            h[iu] = x[d:d + len(iu[0])] + 1j * x[d + len(iu[0]):]
            h = h + np.triu(h, 1).conj().T
            return expm(1j * h)

        def f(x):
            return entropy_of_spectrum(eigvalsh(_conditional_blocks(t, unitary(x))).ravel())

        results = []
        for r in range(self.restarts):
            rng = np.random.default_rng([self.seed, r])
            x0 = rng.normal(scale=1.0, size=d * d)
            res = minimize(f, x0, method="Nelder-Mead",
                           options={"xatol": self.tol, "fatol": self.tol,
                                    "maxiter": self.max_iter * d * d})
            results.append((float(res.fun), r, res.x))
        results.sort(key=lambda z: (z[0], z[1]))
        vals = [z[0] for z in results]
        err = vals[min(len(vals) - 1, max(1, len(vals) // 4))] - vals[0]
        return MeasurementBasis(label, unitary(results[0][2])), err


def discord(rho: DensityMatrix, measured: str, opts: OptimizerOpts | None = None) -> BoundReport:
    """D_{rest|measured}(rho) as a BoundReport (exact or upper)."""
    opts = opts or OptimizerOpts()
    est = DiscordEstimator(measured=measured, grid=opts.grid, tol=opts.tol,
                           max_iter=opts.max_iter, seed=opts.seed, restarts=opts.restarts)
    return est.fit(rho).report_


def discord_sep_bound(d_x: int, d_y: int) -> float:
    """Largest discord a separable state of dimensions d_x, d_y can carry."""
    if d_y <= 1:
        return 0.0
    return (1.0 - 1.0 / (d_x * d_y) ** 2) * math.log2(d_y)


# relative entropy of entanglement ----------------------------------------


_BELL = np.array([[1, 0, 0, 1], [1, 0, 0, -1], [0, 1, 1, 0], [0, 1, -1, 0]]).T / math.sqrt(2.0)


def bell_diagonal_ree(rho: DensityMatrix, cut: CutSpec) -> BoundReport | None:
    """Closed form 1 - h(l_max) for two-qubit states diagonal in the Bell basis.

    Returns ``None`` when the state is not Bell-diagonal.
    """
    r = _ordered_matrix(rho, cut)[0].data
    c = _BELL.T @ r @ _BELL
    lam = np.real(np.diag(c))
    if np.max(np.abs(c - np.diag(np.diag(c)))) > CLASSICAL_TOL:
        return None
    top = float(np.max(lam))
    if top <= 0.5:
        return BoundReport(0.0, EXACT, Certificate("bell-diagonal", lam))
    return BoundReport(1.0 - entropy_of_spectrum([top, 1.0 - top]), EXACT,
                       Certificate("bell-diagonal", lam))


def _ordered_matrix(rho: DensityMatrix, cut: CutSpec):
    left, right = cut.ordered(rho.labels)
    r = permute_subsystems(rho, left + right)
    dl = rho.dim_of(left)
    return r, left, right, dl, rho.dim // dl


def _ree_objective(rho_m, s_rho, dl, dr, k):
    """Objective and gradient of S(rho||sigma) over a product-ensemble parametrization.

    Parameter layout: k weight amplitudes, then k left vectors (re, im),
    then k right vectors (re, im).
    """
    nl, nr = 2 * k * dl, 2 * k * dr
    d = dl * dr

    def unpack(x):
        t = x[:k]
        xl = x[k:k + nl].reshape(2, k, dl)
        xr = x[k + nl:k + nl + nr].reshape(2, k, dr)
        return t, xl[0] + 1j * xl[1], xr[0] + 1j * xr[1]

    def fun(x):
        t, a, b = unpack(x)
        tt = float(t @ t)
        w = t * t / tt
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        ah, bh = a / na[:, None], b / nb[:, None]
        v = (ah[:, :, None] * bh[:, None, :]).reshape(k, d)
        sigma = (v.T * w) @ v.conj()
        lam, u = np.linalg.eigh(sigma)
        lam = np.maximum(lam, 1e-15)
        r = u.conj().T @ rho_m @ u
        loglam = np.log(lam)
        f = -s_rho - float(np.real(np.sum(np.diag(r) * loglam))) / _LN2
        # Frechet derivative of log at sigma, contracted with rho
        diff = lam[:, None] - lam[None, :]
        same = np.abs(diff) < 1e-12 * np.maximum(lam[:, None], lam[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            gam = np.where(same, 1.0 / lam[:, None],
                           (loglam[:, None] - loglam[None, :]) / np.where(same, 1.0, diff))
        m = u @ (gam * r) @ u.conj().T / _LN2
        mv = v @ m.T  # rows are M v_k
        mk = np.real(np.sum(v.conj() * mv, axis=1))
        g_t = (2.0 * t / tt) * (-mk + float(w @ mk))
        gv = (-2.0 * w)[:, None] * mv
        gm = gv.reshape(k, dl, dr)
        g_ah = np.einsum("kij,kj->ki", gm, bh.conj())
        g_bh = np.einsum("kij,ki->kj", gm, ah.conj())
        g_a = (g_ah - np.real(np.sum(ah.conj() * g_ah, axis=1))[:, None] * ah) / na[:, None]
        g_b = (g_bh - np.real(np.sum(bh.conj() * g_bh, axis=1))[:, None] * bh) / nb[:, None]
        grad = np.concatenate([g_t, g_a.real.ravel(), g_a.imag.ravel(),
                               g_b.real.ravel(), g_b.imag.ravel()])
        return f, grad

    return fun, unpack


def _ensemble_from_params(x, unpack, left, right, left_dims, right_dims):
    t, a, b = unpack(x)
    w = t * t / float(t @ t)
    a = a / np.linalg.norm(a, axis=1, keepdims=True)
    b = b / np.linalg.norm(b, axis=1, keepdims=True)
    return SeparableEnsemble(w, a, b, tuple(left), tuple(right),
                             tuple(left_dims), tuple(right_dims))


class REEEstimator(BaseEstimator):
    """Relative entropy of entanglement across a cut.

    Closed forms are tried first (known separable decomposition, PPT on
    2x2 and 2x3 cuts, pure states, classical flags). Otherwise the distance
    to a parametrized mixture of ``ensemble_size`` product states is
    minimized from ``restarts`` random starts; the result is an upper bound.

    Attributes
    ----------
    report_ : BoundReport
    value_ : float
    direction_ : str
    """

    def __init__(self, cut=None, restarts=32, seed=42, tol=1e-9, max_iter=3000,
                 ensemble_size=None, known_separable=None, use_flags=True):
        self.cut = cut
        self.restarts = restarts
        self.seed = seed
        self.tol = tol
        self.max_iter = max_iter
        self.ensemble_size = ensemble_size
        self.known_separable = known_separable
        self.use_flags = use_flags

    def fit(self, X, y=None):
        rho = check_state(X)
        cut = check_cut(self.cut, rho)
        self.report_ = self._solve(rho, cut)
        self.value_ = self.report_.value
        self.direction_ = self.report_.direction
        return self

    def _child(self, cut):
        params = self.get_params()
        params.update(cut=cut, known_separable=None)
        return REEEstimator(**params)

    def _solve(self, rho: DensityMatrix, cut: CutSpec) -> BoundReport:
        if self.known_separable is not None:
            sigma = check_state(self.known_separable) if not isinstance(
                self.known_separable, SeparableEnsemble) else self.known_separable.assemble(rho.labels)
            sigma = permute_subsystems(sigma, rho.labels)
            if np.max(np.abs(sigma.data - rho.data)) > 1e-9:
                raise StateError("supplied separable decomposition does not reproduce the state")
            return BoundReport(0.0, EXACT, Certificate("known-separable", self.known_separable))
        if rho.is_pure(PURE_TOL):
            s = von_neumann_entropy(partial_trace(rho, cut.left))
            return BoundReport(s, EXACT, Certificate("pure-closed-form"))
        verdict = ppt_check(rho, cut)
        if verdict.certifies_separable:
            return BoundReport(0.0, EXACT, Certificate("ppt-exact", verdict))
        if rho.dim_of(cut.left) == 2 and rho.dim_of(cut.right) == 2:
            rep = bell_diagonal_ree(rho, cut)
            if rep is not None:
                return rep
        if self.use_flags:
            rep = self._flag_path(rho, cut)
            if rep is not None:
                return rep
        return self._numeric(rho, cut)

    def _flag_path(self, rho, cut):
        for label in rho.labels:
            basis = classical_basis(rho, label)
            if basis is None:
                continue
            return ree_flag_eval(rho, label, cut, basis=basis, estimator=self)
        return None

    def _numeric(self, rho, cut) -> BoundReport:
        if rho.dim > REE_MAX_DIM:
            raise CapabilityError(f"entanglement optimization supports dimension <= {REE_MAX_DIM}")
        r, left, right, dl, dr = _ordered_matrix(rho, cut)
        k = self.ensemble_size or (dl * dr) ** 2
        s_rho = von_neumann_entropy(rho)
        fun, unpack = _ree_objective(r.data, s_rho, dl, dr, k)
        left_dims = [rho.dims[rho.index(x)] for x in left]
        right_dims = [rho.dims[rho.index(x)] for x in right]
        def stop_at_zero(intermediate_result):
            if intermediate_result.fun < ZERO_STOP:
                raise StopIteration

        results = []
        for i in range(self.restarts):
            rng = np.random.default_rng([self.seed, i])
            x0 = np.concatenate([1.0 + 0.1 * rng.random(k),
                                 rng.normal(size=2 * k * (dl + dr))])
            res = minimize(fun, x0, jac=True, method="L-BFGS-B", callback=stop_at_zero,
                           options={"maxiter": self.max_iter, "ftol": 1e-15,
                                    "gtol": self.tol, "maxcor": 30})
            ens = _ensemble_from_params(res.x, unpack, left, right, left_dims, right_dims)
            sigma = ens.assemble(rho.labels)
            results.append((relative_entropy(rho, sigma), i, ens))
            if results[-1][0] < ZERO_STOP:
                # nothing left to gain from further restarts
                break
            best = min(z[0] for z in results)
            if sum(z[0] <= best + CONSENSUS_TOL for z in results) >= CONSENSUS:
                # enough independent starts agree on the minimum
                break
        results.sort(key=lambda z: (z[0], z[1]))
        vals = [z[0] for z in results]
        if not math.isfinite(vals[0]):
            raise RuntimeError("no restart reached a finite relative entropy")
        err = vals[min(len(vals) - 1, max(1, len(vals) // 4))] - vals[0]
        return BoundReport(vals[0], UPPER, Certificate("separable-ensemble", results[0][2]),
                           err if math.isfinite(err) else math.inf)


def ree(rho: DensityMatrix, cut, opts: OptimizerOpts | None = None, known_separable=None) -> BoundReport:
    opts = opts or OptimizerOpts()
    est = REEEstimator(cut=cut, restarts=opts.restarts, seed=opts.seed,
                       known_separable=known_separable)
    return est.fit(rho).report_


def ree_flag_eval(rho: DensityMatrix, flag: str, cut, basis: MeasurementBasis | None = None,
                  opts: OptimizerOpts | None = None, estimator: REEEstimator | None = None) -> BoundReport:
    """Entanglement of a state carrying orthogonal classical flags on ``flag``.

    The value is the probability-weighted entanglement of the conditional
    states, which is exact whenever every conditional evaluation is.
    """
    rho = check_state(rho)
    cut = check_cut(cut, rho)
    d = rho.dims[rho.index(flag)]
    if basis is None:
        basis = classical_basis(rho, flag)
        if basis is None:
            raise StateError(f"state carries no classical flag on {flag!r}")
    elif not _is_invariant(rho, basis):
        raise StateError(f"state is not block-diagonal in the given basis on {flag!r}")
    side = cut.left if flag in cut.left else cut.right
    if len(side) == 1:
        # quantum-classical across flag:rest, hence separable
        return BoundReport(0.0, EXACT, Certificate("classical-flag", basis))
    if estimator is None:
        opts = opts or OptimizerOpts()
        estimator = REEEstimator(cut=cut, restarts=opts.restarts, seed=opts.seed)
    sub_cut = CutSpec(cut.left - {flag}, cut.right - {flag})
    total, exact, err, parts = 0.0, True, 0.0, []
    for j in range(d):
        p, cond = project_subsystem(rho, flag, basis.vectors[:, j])
        if cond is None:
            continue
        rep = estimator._child(sub_cut).fit(cond).report_
        total += p * rep.value
        err += p * rep.error_estimate
        exact &= rep.direction == EXACT
        parts.append((p, rep))
    return BoundReport(total, EXACT if exact else UPPER,
                       Certificate("flag-decomposition", {"basis": basis, "parts": parts}), err)


def ree_lower_bound(rho: DensityMatrix, cut) -> BoundReport:
    """Lower bound from the hashing inequality, refined through classical flags."""
    rho = check_state(rho)
    cut = check_cut(cut, rho)
    if rho.is_pure(PURE_TOL):
        return BoundReport(von_neumann_entropy(partial_trace(rho, cut.left)), EXACT,
                           Certificate("pure-closed-form"))
    best = max(coherent_information(rho, cut), 0.0)
    for label in rho.labels:
        side = cut.left if label in cut.left else cut.right
        if len(side) == 1:
            continue
        basis = classical_basis(rho, label)
        if basis is None:
            continue
        sub_cut = CutSpec(cut.left - {label}, cut.right - {label})
        total = 0.0
        for j in range(basis.vectors.shape[1]):
            p, cond = project_subsystem(rho, label, basis.vectors[:, j])
            if cond is not None:
                total += p * ree_lower_bound(cond, sub_cut).value
        best = max(best, total)
    return BoundReport(best, LOWER, Certificate("hashing"))
