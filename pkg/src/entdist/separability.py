"""PPT test, Schmidt decomposition and the Vidal-Tarrach threshold."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qstate import (
    CutSpec,
    DensityMatrix,
    PureState,
    StateError,
    eigh,
    partial_transpose,
)

NPT_TOL = 1e-9


@dataclass(frozen=True)
class SchmidtData:
    """Schmidt coefficients (descending) with left/right vectors as columns."""

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    left_labels: tuple
    right_labels: tuple

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > 1e-12))

    def top_product(self) -> float:
        c = self.coefficients
        return float(c[0] * c[1]) if c.size > 1 else 0.0

    def reconstruct(self) -> np.ndarray:
        """Vector in (left, right) tensor order."""
        return np.einsum("k,ik,jk->ij", self.coefficients, self.left_vectors,
                         self.right_vectors).ravel()


@dataclass(frozen=True)
class PptVerdict:
    min_eigenvalue: float
    is_npt: bool
    witness_vector: np.ndarray
    exact_criterion: bool
    cut: CutSpec = field(compare=False, default=None)

    @property
    def certifies_separable(self) -> bool:
        return self.exact_criterion and not self.is_npt

    @property
    def inconclusive_if_ppt(self) -> bool:
        return not self.exact_criterion


@dataclass(frozen=True)
class VTFamily:
    psi: PureState
    cut: CutSpec
    d_tot: int
    p: float
    p_cr: float


def _reorder_vector(psi: PureState, order: list[str]) -> np.ndarray:
    perm = [psi.labels.index(x) for x in order]
    return psi.amplitudes.reshape(psi.dims).transpose(perm).ravel()


def schmidt(psi: PureState, cut: CutSpec) -> SchmidtData:
    """Schmidt decomposition across ``cut``.

    Uses the eigendecomposition of the left reduced state; right vectors
    follow by back-substitution.
    """
    if abs(np.linalg.norm(psi.amplitudes) - 1.0) > 1e-10:
        raise StateError("schmidt needs a unit vector")
    cut.check(psi)
    left, right = cut.ordered(psi.labels)
    dl = int(np.prod([psi.dims[psi.labels.index(x)] for x in left]))
    dr = int(np.prod([psi.dims[psi.labels.index(x)] for x in right]))
    m = _reorder_vector(psi, left + right).reshape(dl, dr)
    lam, vec = eigh(m @ m.conj().T)
    lam, vec = lam[::-1], vec[:, ::-1]
    k = min(dl, dr)
    coeffs = np.sqrt(np.clip(lam[:k], 0.0, None))
    lvec = vec[:, :k]
    rvec = np.zeros((dr, k), dtype=complex)
    for j in range(k):
        if coeffs[j] > 1e-12:
            rvec[:, j] = (lvec[:, j].conj() @ m) / coeffs[j]
    rvec = _complete_columns(rvec, coeffs > 1e-12)
    return SchmidtData(coeffs, lvec, rvec, tuple(left), tuple(right))


def _complete_columns(cols: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Replace invalid columns by an orthonormal completion of the valid ones."""
    out = cols.copy()
    basis = [out[:, j] for j in range(out.shape[1]) if valid[j]]
    todo = [j for j in range(out.shape[1]) if not valid[j]]
    for e in np.eye(out.shape[0], dtype=complex):
        if not todo:
            break
        v = e - sum((b.conj() @ e) * b for b in basis) if basis else e
        nv = np.linalg.norm(v)
        if nv > 1e-10:
            v = v / nv
            basis.append(v)
            out[:, todo.pop(0)] = v
    return out


def ppt_check(rho: DensityMatrix, cut: CutSpec) -> PptVerdict:
    cut.check(rho)
    w, v = eigh(partial_transpose(rho, cut.left))
    dl, dr = rho.dim_of(cut.left), rho.dim_of(cut.right)
    exact = sorted((dl, dr)) in ([2, 2], [2, 3])
    return PptVerdict(float(w[0]), bool(w[0] < -NPT_TOL), v[:, 0].copy(), exact, cut)


def vt_threshold(psi: PureState, cut: CutSpec, p: float = 0.0) -> VTFamily:
    """Critical weight below which p|psi><psi| + (1-p) I/d is separable."""
    d_tot = int(np.prod(psi.dims))
    a1a2 = schmidt(psi, cut).top_product()
    return VTFamily(psi, cut, d_tot, float(p), 1.0 / (1.0 + a1a2 * d_tot))


def vt_family_state(fam: VTFamily) -> DensityMatrix:
    if not 0.0 <= fam.p <= 1.0:
        raise StateError(f"mixing weight {fam.p} outside [0, 1]")
    v = fam.psi.amplitudes
    m = fam.p * np.outer(v, v.conj()) + (1.0 - fam.p) * np.eye(v.size) / v.size
    return DensityMatrix(m, fam.psi.dims, fam.psi.labels)


@dataclass(frozen=True)
class AdmissibilityRecord:
    a1a2: float
    b1b2: float
    c1c2: float
    M: float
    Upsilon: float
    admissible: bool


def example1_admissible(psi_abc: PureState) -> AdmissibilityRecord:
    """Schmidt products for the three single-party cuts of a tripartite state.

    The state is admissible when the first party's product strictly exceeds
    both others; ``Upsilon`` is the critical weight of the larger of those two.
    """
    if len(psi_abc.labels) != 3:
        raise StateError("example1_admissible needs a tripartite state")
    labels = psi_abc.labels
    prods = []
    for x in labels:
        cut = CutSpec({x}, set(labels) - {x})
        prods.append(schmidt(psi_abc, cut).top_product())
    a, b, c = prods
    m = max(b, c)
    d_tot = int(np.prod(psi_abc.dims))
    return AdmissibilityRecord(a, b, c, m, 1.0 / (1.0 + m * d_tot), bool(a > m + 1e-12))


