"""The truncated unitary matrix relating the base and deformed eigenbases.

U_{nm} = <psi_n|theta_m> is assembled by two independent routes (direct
quadrature overlaps, and the closed-form level-coupling integrals) and its
deviation from unitarity on a leading block quantifies truncation leakage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .basis import BasisSet
from .deform import Deformation
from .numerics import first_derivative, simpson_weights

__all__ = [
    "OverlapMatrix",
    "overlap_matrix",
    "matrix_elements_closed_form",
    "unitarity_defect",
    "save_matrix_csv",
    "save_matrix_json",
    "load_matrix_csv",
    "load_matrix_json",
]

ROUTE_OVERLAP = "quadrature-overlap"
ROUTE_CLOSED_FORM = "closed-form"

_DIFF_ORDER = 4


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    """Truncated N x N change-of-basis matrix with its provenance route."""

    entries: np.ndarray
    lam: float
    truncation: int
    route: str

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if e.shape != (self.truncation, self.truncation):
            raise ValueError(f"entries shape {e.shape} does not match truncation {self.truncation}")
        object.__setattr__(self, "entries", e)


def _check_truncation(basis: BasisSet, N: int) -> int:
    N = int(N)
    if not 1 <= N <= basis.n_max + 1:
        raise ValueError(f"truncation exceeds basis: need 1 <= N <= {basis.n_max + 1}, got {N}")
    return N


def overlap_matrix(basis: BasisSet, d: Deformation, N: int) -> OverlapMatrix:
    """U_{nm} = <psi_n|theta_m> for n, m < N by direct quadrature."""
    N = _check_truncation(basis, N)
    w = simpson_weights(basis.grid)
    psi = basis.stack(N)
    theta = np.stack([f.values for f in d.theta[:N]])
    entries = (psi * w) @ theta.T
    return OverlapMatrix(entries=entries, lam=d.lam, truncation=N, route=ROUTE_OVERLAP)


def matrix_elements_closed_form(basis: BasisSet, d: Deformation, N: int) -> OverlapMatrix:
    """Same matrix from the closed-form column expressions.

    Column 0 integrates psi_n against the unnormalized deformed ground
    profile; column m+1 is the identity plus one level-coupling integral.
    Columns are sign-fixed to the positive-diagonal convention used for the
    deformed states themselves.
    """
    N = _check_truncation(basis, N)
    grid = basis.grid
    w = simpson_weights(grid)
    psi = basis.stack(N)
    lam = d.lam
    entries = np.empty((N, N))
    ground_profile = np.sqrt(lam * (lam + 1.0)) * basis.eigenfunctions[0].values / (lam + d.cumulative.values)
    entries[:, 0] = psi @ (w * ground_profile)
    for m in range(N - 1):
        src = basis.eigenfunctions[m + 1].values
        gap = float(basis.energies[m + 1] - basis.E0)
        coupling = d.phi.values * (first_derivative(src, grid.h, order=_DIFF_ORDER) + basis.W.values * src)
        entries[:, m + 1] = psi @ (w * coupling) / (2.0 * gap)
        entries[m + 1, m + 1] += 1.0
    for m in range(N):
        if entries[m, m] < 0:
            entries[:, m] *= -1.0
    return OverlapMatrix(entries=entries, lam=lam, truncation=N, route=ROUTE_CLOSED_FORM)


def unitarity_defect(U: OverlapMatrix, block: int):
    """Sup-norm of (U'U - I) and (UU' - I) on the leading block x block
    window.  Meaningful only for block well below the truncation, since the
    exact operator is unitary on the full space and truncation alone breaks
    the tail.  Returns (left, right).
    """
    block = int(block)
    if not 1 <= block <= U.truncation:
        raise ValueError(f"block out of range: need 1 <= block <= {U.truncation}, got {block}")
    e = U.entries
    eye = np.eye(U.truncation)
    left = float(np.abs(e.T @ e - eye)[:block, :block].max())
    right = float(np.abs(e @ e.T - eye)[:block, :block].max())
    return left, right


def save_matrix_csv(U: OverlapMatrix, path) -> None:
    """Row-major CSV export with header n,m,value (17 significant digits)."""
    from .io import format_float, write_text_atomic

    lines = ["n,m,value"]
    for n in range(U.truncation):
        for m in range(U.truncation):
            lines.append(f"{n},{m},{format_float(U.entries[n, m])}")
    write_text_atomic(path, "\n".join(lines) + "\n")


def save_matrix_json(U: OverlapMatrix, path) -> None:
    from .io import dumps_canonical, write_text_atomic

    payload = {
        "lambda": float(U.lam),
        "truncation": int(U.truncation),
        "route": U.route,
        "entries": [[float(v) for v in row] for row in U.entries],
    }
    write_text_atomic(path, dumps_canonical(payload))


def load_matrix_csv(path, lam: float = float("nan"), route: str = ROUTE_OVERLAP) -> OverlapMatrix:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    size = int(np.sqrt(data.shape[0]))
    if size * size != data.shape[0]:
        raise ValueError(f"matrix CSV has {data.shape[0]} rows, not a square matrix")
    entries = np.empty((size, size))
    entries[data[:, 0].astype(int), data[:, 1].astype(int)] = data[:, 2]
    return OverlapMatrix(entries=entries, lam=lam, truncation=size, route=route)


def load_matrix_json(path) -> OverlapMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return OverlapMatrix(
        entries=np.asarray(payload["entries"], dtype=np.float64),
        lam=float(payload["lambda"]),
        truncation=int(payload["truncation"]),
        route=str(payload["route"]),
    )
