"""Dense multipartite density matrices.

States are stored as dense complex matrices over the computational basis,
big-endian over the label order: the first label is the most significant
tensor index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERM_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
REPAIR_TOL = 1e-7
UNITARY_TOL = 1e-9
MAX_DIM = 64


class StateError(ValueError):
    """Raised for malformed states, labels, cuts or operators."""


class CapabilityError(RuntimeError):
    """Raised when a request exceeds what the dense routines support."""


def _as_labels(labels: Iterable[str]) -> tuple[str, ...]:
    labels = tuple(str(x) for x in labels)
    if len(set(labels)) != len(labels):
        raise StateError(f"duplicate labels in {labels}")
    return labels


def eigh(m: np.ndarray, tol: float = HERM_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized before decomposition. Eigenvalues come back in
    ascending order with orthonormal eigenvectors as columns.

    Raises
    ------
    StateError
        If ``m`` deviates from Hermitian by more than ``tol`` (max-norm).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise StateError(f"matrix is not Hermitian (deviation {dev:.3e})")
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def eigvalsh(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return np.linalg.eigvalsh(0.5 * (m + np.swapaxes(m.conj(), -1, -2)))


class DensityMatrix:
    """An immutable labelled mixed state.

    Parameters
    ----------
    data : array_like
        Square complex matrix of side ``prod(dims)``.
    dims : sequence of int
        Subsystem dimensions, each at least 2.
    labels : sequence of str
        Distinct subsystem names, in tensor order.
    repair : bool
        Project slightly invalid input (within 1e-7) back onto the state
        space by symmetrizing, clipping negative eigenvalues and renormalizing.
    """

    __slots__ = ("_data", "dims", "labels")

    def __init__(self, data, dims: Sequence[int], labels: Sequence[str], repair: bool = False):
        dims = tuple(int(d) for d in dims)
        labels = _as_labels(labels)
        if len(dims) != len(labels):
            raise StateError("dims and labels differ in length")
        if any(d < 2 for d in dims):
            raise StateError(f"every subsystem dimension must be >= 2, got {dims}")
        n = int(np.prod(dims))
        if n > MAX_DIM:
            raise CapabilityError(f"total dimension {n} exceeds {MAX_DIM}")
        m = np.array(data, dtype=complex)
        if m.shape != (n, n):
            raise StateError(f"matrix shape {m.shape} does not match dims {dims}")
        if not np.all(np.isfinite(m)):
            raise StateError("matrix has non-finite entries")
        if repair:
            m = _repair(m)
        _validate(m)
        m.setflags(write=False)
        self._data = m
        self.dims = dims
        self.labels = labels

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    def dim_of(self, labels: Iterable[str]) -> int:
        return int(np.prod([self.dims[self.index(x)] for x in labels]))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise StateError(f"unknown label {label!r}; state has {self.labels}") from None

    def eigvals(self) -> np.ndarray:
        return eigvalsh(self._data)

    def is_pure(self, tol: float = 1e-10) -> bool:
        return bool(self.eigvals()[-1] >= 1.0 - tol)

    def with_labels(self, labels: Sequence[str]) -> "DensityMatrix":
        return DensityMatrix(self._data, self.dims, labels)

    def __repr__(self):
        return f"DensityMatrix(labels={self.labels}, dims={self.dims})"

    # constructors -----------------------------------------------------

    @classmethod
    def from_pure(cls, amplitudes, dims: Sequence[int], labels: Sequence[str]) -> "DensityMatrix":
        return PureState(amplitudes, dims, labels).projector()

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int], labels: Sequence[str]) -> "DensityMatrix":
        n = int(np.prod(dims))
        return cls(np.eye(n) / n, dims, labels)

    @classmethod
    def basis_state(cls, bits: Sequence[int], dims: Sequence[int], labels: Sequence[str]) -> "DensityMatrix":
        n = int(np.prod(dims))
        v = np.zeros(n)
        v[np.ravel_multi_index(tuple(bits), tuple(dims))] = 1.0
        return cls(np.outer(v, v), dims, labels)

    # serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "dims": list(self.dims),
            "re": [[float(x) for x in row] for row in self._data.real],
            "im": [[float(x) for x in row] for row in self._data.imag],
        }

    @classmethod
    def from_dict(cls, obj: dict, repair: bool = False) -> "DensityMatrix":
        for key in ("labels", "dims", "re"):
            if key not in obj:
                raise StateError(f"state file is missing field {key!r}")
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise StateError("fields 're' and 'im' differ in shape")
        return cls(re + 1j * im, obj["dims"], obj["labels"], repair=repair)

    def to_json(self) -> str:
        # repr of a Python float round-trips, i.e. 17 significant digits
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, repair: bool = False) -> "DensityMatrix":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StateError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise StateError("state file must hold a JSON object")
        return cls.from_dict(obj, repair=repair)


def _repair(m: np.ndarray) -> np.ndarray:
    h = 0.5 * (m + m.conj().T)
    if np.max(np.abs(m - h)) > REPAIR_TOL:
        raise StateError("matrix too far from Hermitian to repair")
    w, v = np.linalg.eigh(h)
    if w[0] < -REPAIR_TOL or abs(w.sum() - 1.0) > REPAIR_TOL:
        raise StateError("matrix too far from a valid state to repair")
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    return (v * w) @ v.conj().T


def _validate(m: np.ndarray) -> None:
    dev = np.max(np.abs(m - m.conj().T))
    if dev > HERM_TOL:
        raise StateError(f"state is not Hermitian (deviation {dev:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise StateError(f"state trace is {tr!r}, expected 1")
    lo = eigvalsh(m)[0]
    if lo < -PSD_TOL:
        raise StateError(f"state is not positive semidefinite (min eigenvalue {lo:.3e})")


class PureState:
    """A labelled unit vector."""

    __slots__ = ("amplitudes", "dims", "labels")

    def __init__(self, amplitudes, dims: Sequence[int], labels: Sequence[str]):
        dims = tuple(int(d) for d in dims)
        labels = _as_labels(labels)
        if len(dims) != len(labels):
            raise StateError("dims and labels differ in length")
        v = np.array(amplitudes, dtype=complex).ravel()
        if v.size != int(np.prod(dims)):
            raise StateError(f"vector length {v.size} does not match dims {dims}")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise StateError(f"vector norm is {np.linalg.norm(v)!r}, expected 1")
        v.setflags(write=False)
        self.amplitudes = v
        self.dims = dims
        self.labels = labels

    @classmethod
    def normalized(cls, amplitudes, dims, labels) -> "PureState":
        v = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(v / np.linalg.norm(v), dims, labels)

    def projector(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.dims, self.labels)

    def __repr__(self):
        return f"PureState(labels={self.labels}, dims={self.dims})"


@dataclass(frozen=True)
class CutSpec:
    """A bipartition of subsystem labels."""

    left: frozenset
    right: frozenset

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        if not self.left or not self.right:
            raise StateError("both sides of a cut must be nonempty")
        if self.left & self.right:
            raise StateError(f"cut sides overlap on {sorted(self.left & self.right)}")

    @classmethod
    def parse(cls, text: str) -> "CutSpec":
        """Parse ``"A:BC"`` or ``"A,C:B"`` notation."""
        if text.count(":") != 1:
            raise StateError(f"cut {text!r} must contain exactly one ':'")
        sides = []
        for part in text.split(":"):
            part = part.strip()
            sides.append([x.strip() for x in part.split(",")] if "," in part else list(part))
        return cls(frozenset(sides[0]), frozenset(sides[1]))

    def check(self, state) -> "CutSpec":
        labels = set(state.labels)
        unknown = (self.left | self.right) - labels
        if unknown:
            raise StateError(f"cut uses unknown labels {sorted(unknown)}")
        if (self.left | self.right) != labels:
            raise StateError(f"cut {self} does not cover labels {state.labels}")
        return self

    def ordered(self, labels: Sequence[str]) -> tuple[list[str], list[str]]:
        return [x for x in labels if x in self.left], [x for x in labels if x in self.right]

    def swap(self) -> "CutSpec":
        return CutSpec(self.right, self.left)

    def __str__(self):
        return "".join(sorted(self.left)) + ":" + "".join(sorted(self.right))


class UnitaryOp:
    """A unitary acting on a named subset of subsystems."""

    __slots__ = ("matrix", "dims", "labels")

    def __init__(self, matrix, dims: Sequence[int], labels: Sequence[str]):
        dims = tuple(int(d) for d in dims)
        labels = _as_labels(labels)
        u = np.array(matrix, dtype=complex)
        n = int(np.prod(dims))
        if u.shape != (n, n):
            raise StateError(f"operator shape {u.shape} does not match dims {dims}")
        dev = np.max(np.abs(u @ u.conj().T - np.eye(n)))
        if dev > UNITARY_TOL:
            raise StateError(f"operator is not unitary (deviation {dev:.3e})")
        u.setflags(write=False)
        self.matrix = u
        self.dims = dims
        self.labels = labels

    def dagger(self) -> "UnitaryOp":
        return UnitaryOp(self.matrix.conj().T, self.dims, self.labels)

    def __repr__(self):
        return f"UnitaryOp(labels={self.labels}, dims={self.dims})"


def cnot(control: str, target: str) -> UnitaryOp:
    """CNOT on two qubits, control listed first."""
    u = np.eye(4)[[0, 1, 3, 2]]
    return UnitaryOp(u, (2, 2), (control, target))


# operations ---------------------------------------------------------------


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    clash = set(a.labels) & set(b.labels)
    if clash:
        raise StateError(f"label collision: {sorted(clash)}")
    return DensityMatrix(np.kron(a.data, b.data), a.dims + b.dims, a.labels + b.labels)


def tensor_all(states: Sequence[DensityMatrix]) -> DensityMatrix:
    return reduce(tensor, states)


def _as_tensor(rho: DensityMatrix) -> np.ndarray:
    return rho.data.reshape(rho.dims + rho.dims)


def partial_trace(rho: DensityMatrix, keep: Iterable[str]) -> DensityMatrix:
    keep = set(keep)
    if not keep:
        raise StateError("partial_trace needs at least one label to keep")
    for x in keep:
        rho.index(x)
    n = len(rho.dims)
    kept = [i for i, x in enumerate(rho.labels) if x in keep]
    traced = [i for i in range(n) if i not in kept]
    t = _as_tensor(rho)
    # einsum: contract each traced axis with its column partner
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for i in traced:
        col[i] = row[i]
    out = [row[i] for i in kept] + [col[i] for i in kept]
    red = np.einsum("".join(row) + "".join(col) + "->" + "".join(out), t)
    dims = tuple(rho.dims[i] for i in kept)
    d = int(np.prod(dims))
    return DensityMatrix(red.reshape(d, d), dims, tuple(rho.labels[i] for i in kept), repair=True)


def partial_transpose(rho: DensityMatrix, side: Iterable[str]) -> np.ndarray:
    """Transpose the factors named in ``side``; returns a plain matrix."""
    side = set(side)
    for x in side:
        rho.index(x)
    n = len(rho.dims)
    axes = list(range(2 * n))
    for i, x in enumerate(rho.labels):
        if x in side:
            axes[i], axes[n + i] = n + i, i
    return _as_tensor(rho).transpose(axes).reshape(rho.dim, rho.dim)


def embed(u: UnitaryOp, dims: Sequence[int], labels: Sequence[str]) -> np.ndarray:
    """Full-space matrix of ``u`` with identity on the untouched subsystems."""
    labels = tuple(labels)
    dims = tuple(dims)
    pos = []
    for x, d in zip(u.labels, u.dims):
        if x not in labels:
            raise StateError(f"operator label {x!r} not in state labels {labels}")
        i = labels.index(x)
        if dims[i] != d:
            raise StateError(f"dimension mismatch on {x!r}: operator {d}, state {dims[i]}")
        pos.append(i)
    rest = [i for i in range(len(labels)) if i not in pos]
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    full = np.kron(u.matrix, np.eye(d_rest))
    # reorder the (u-labels, rest) tensor layout onto the state layout
    order = pos + rest
    src_dims = [dims[i] for i in order]
    k = len(labels)
    t = full.reshape(src_dims + src_dims)
    perm = [order.index(i) for i in range(k)]
    t = t.transpose(perm + [k + p for p in perm])
    n = int(np.prod(dims))
    return t.reshape(n, n)


def apply_unitary(rho: DensityMatrix, u: UnitaryOp) -> DensityMatrix:
    m = embed(u, rho.dims, rho.labels)
    return DensityMatrix(m @ rho.data @ m.conj().T, rho.dims, rho.labels, repair=True)


def apply_unitary_vector(psi: PureState, u: UnitaryOp) -> PureState:
    m = embed(u, psi.dims, psi.labels)
    return PureState.normalized(m @ psi.amplitudes, psi.dims, psi.labels)


def permute_subsystems(rho: DensityMatrix, new_order: Sequence[str]) -> DensityMatrix:
    new_order = list(new_order)
    if sorted(new_order) != sorted(rho.labels) or len(new_order) != len(rho.labels):
        raise StateError(f"{new_order} is not a permutation of {list(rho.labels)}")
    perm = [rho.labels.index(x) for x in new_order]
    n = len(perm)
    t = _as_tensor(rho).transpose(perm + [n + p for p in perm])
    dims = tuple(rho.dims[p] for p in perm)
    return DensityMatrix(t.reshape(rho.dim, rho.dim), dims, tuple(new_order))


def project_subsystem(rho: DensityMatrix, label: str, vector) -> tuple[float, DensityMatrix | None]:
    """Project ``label`` onto ``vector`` and drop it.

    Returns the outcome probability and the normalized conditional state of
    the remaining subsystems (``None`` when the probability vanishes).
    """
    i = rho.index(label)
    v = np.asarray(vector, dtype=complex)
    n = len(rho.dims)
    t = np.moveaxis(_as_tensor(rho), (i, n + i), (n - 1, 2 * n - 1))
    # t[..., y, ..., y'] -> <v| . |v>
    rest_dims = [d for k, d in enumerate(rho.dims) if k != i]
    d_rest = int(np.prod(rest_dims))
    t = t.reshape(d_rest, rho.dims[i], d_rest, rho.dims[i])
    block = np.einsum("i,aibj,j->ab", v.conj(), t, v)
    p = float(np.trace(block).real)
    if p <= 1e-14:
        return max(p, 0.0), None
    labels = tuple(x for x in rho.labels if x != label)
    return p, DensityMatrix(block / p, rest_dims, labels, repair=True)
