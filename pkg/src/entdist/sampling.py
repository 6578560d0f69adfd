"""Seeded random states and unitaries."""

from __future__ import annotations

import numpy as np

from .correlations import SeparableEnsemble
from .qstate import DensityMatrix, PureState, UnitaryOp

ABC = ("A", "B", "C")


def _gaussian(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_vector(rng, d: int) -> np.ndarray:
    v = _gaussian(rng, d)
    return v / np.linalg.norm(v)


def random_pure(rng, dims=(2, 2, 2), labels=ABC) -> PureState:
    return PureState(random_vector(rng, int(np.prod(dims))), dims, labels)


def random_mixed(rng, dims=(2, 2, 2), labels=ABC, rank=None) -> DensityMatrix:
    """Hilbert-Schmidt-like draw: G G^dag / Tr, G of shape (d, rank)."""
    d = int(np.prod(dims))
    g = _gaussian(rng, d, rank or d)
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, dims, labels, repair=True)


def random_unitary_matrix(rng, d: int) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Gaussian matrix."""
    q, r = np.linalg.qr(_gaussian(rng, d, d))
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_unitary(rng, dims, labels) -> UnitaryOp:
    return UnitaryOp(random_unitary_matrix(rng, int(np.prod(dims))), dims, labels)


def random_separable(rng, left_dims, right_dims, left_labels, right_labels, k=None) -> SeparableEnsemble:
    dl, dr = int(np.prod(left_dims)), int(np.prod(right_dims))
    k = k or (dl * dr) ** 2
    w = rng.dirichlet(np.ones(k))
    a = _gaussian(rng, k, dl)
    b = _gaussian(rng, k, dr)
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    return SeparableEnsemble(w, a, b, tuple(left_labels), tuple(right_labels),
                             tuple(left_dims), tuple(right_dims))


def random_two_qubit(rng, labels=("A", "C")) -> DensityMatrix:
    return random_mixed(rng, (2, 2), labels)
