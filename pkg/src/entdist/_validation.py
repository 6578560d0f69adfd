"""Input coercion shared by the estimators and the CLI."""

from __future__ import annotations

from .qstate import CutSpec, DensityMatrix, PureState, StateError


def check_state(X) -> DensityMatrix:
    """Accept a DensityMatrix, a PureState or a state-file dict."""
    if isinstance(X, DensityMatrix):
        return X
    if isinstance(X, PureState):
        return X.projector()
    if isinstance(X, dict):
        return DensityMatrix.from_dict(X)
    raise StateError(f"expected a DensityMatrix, got {type(X).__name__}")


def check_cut(cut, rho: DensityMatrix) -> CutSpec:
    if cut is None:
        raise StateError("a cut is required")
    if isinstance(cut, str):
        cut = CutSpec.parse(cut)
    if not isinstance(cut, CutSpec):
        raise StateError(f"expected a CutSpec or 'A:BC' string, got {type(cut).__name__}")
    return cut.check(rho)


def check_label(label, rho: DensityMatrix) -> str:
    if not isinstance(label, str):
        raise StateError(f"expected a subsystem label, got {label!r}")
    rho.index(label)
    if len(rho.labels) < 2:
        raise StateError("need at least two subsystems")
    return label
