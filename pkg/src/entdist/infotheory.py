"""Entropic quantities in bits."""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .qstate import CutSpec, DensityMatrix, StateError, eigh, partial_trace

EIG_FLOOR = 1e-12
SUPPORT_TOL = 1e-9


def entropy_of_spectrum(w) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > EIG_FLOOR]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    return max(entropy_of_spectrum(rho.eigvals()), 0.0)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho || sigma) in bits; ``math.inf`` when the support condition fails."""
    if rho.dims != sigma.dims or rho.labels != sigma.labels:
        raise StateError("relative_entropy needs states on the same subsystems")
    return relative_entropy_matrix(rho.data, sigma.data)


def relative_entropy_matrix(rho: np.ndarray, sigma: np.ndarray) -> float:
    lam, vec = eigh(sigma)
    r = vec.conj().T @ rho @ vec
    diag = np.real(np.diag(r))
    null = lam < EIG_FLOOR
    if np.any(null):
        # weight of rho outside supp(sigma)
        leak = float(np.sum(diag[null]))
        if leak > SUPPORT_TOL:
            return math.inf
    log_lam = np.zeros_like(lam)
    log_lam[~null] = np.log2(lam[~null])
    cross = float(np.sum(diag * log_lam))
    s = entropy_of_spectrum(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)))
    return max(-s - cross, 0.0)


def mutual_information(rho: DensityMatrix, cut: CutSpec) -> float:
    cut.check(rho)
    s_left = von_neumann_entropy(partial_trace(rho, cut.left))
    s_right = von_neumann_entropy(partial_trace(rho, cut.right))
    return max(s_left + s_right - von_neumann_entropy(rho), 0.0)


def conditional_entropy(rho: DensityMatrix, of: Iterable[str], given: Iterable[str]) -> float:
    """S(of | given) = S(of, given) - S(given); may be negative."""
    of, given = set(of), set(given)
    if not of or not given:
        raise StateError("conditional_entropy needs nonempty label sets")
    if of & given:
        raise StateError(f"label sets overlap on {sorted(of & given)}")
    joint = von_neumann_entropy(partial_trace(rho, of | given))
    return joint - von_neumann_entropy(partial_trace(rho, given))


def coherent_information(rho: DensityMatrix, cut: CutSpec) -> float:
    """max(S(left), S(right)) - S(rho): a lower bound on distillable entanglement."""
    cut.check(rho)
    s = von_neumann_entropy(rho)
    return max(von_neumann_entropy(partial_trace(rho, cut.left)),
               von_neumann_entropy(partial_trace(rho, cut.right))) - s
