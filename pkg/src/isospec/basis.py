"""Harmonic-oscillator eigenbasis and Fock-space ladder algebra.

The basis is a plain data record, so a non-oscillator system (user-supplied
eigenfunctions, energies and superpotential samples) can be loaded from
file and fed through the same deformation machinery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .numerics import Grid, SampledFunction, make_grid

__all__ = [
    "PSI_TAG",
    "THETA_TAG",
    "BasisSet",
    "FockVector",
    "build_oscillator_basis",
    "apply_lowering",
    "apply_raising",
    "quadrature_moments",
    "save_basis_csv",
    "load_basis_csv",
]

PSI_TAG = "psi-basis"
THETA_TAG = "theta-basis"

_NORM_ATOL = 1e-8


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Eigenfunctions psi_0..psi_n_max, their energies, and the superpotential W."""

    grid: Grid
    n_max: int
    eigenfunctions: tuple
    energies: np.ndarray
    W: SampledFunction
    E0: float

    def stack(self, count: int | None = None) -> np.ndarray:
        """Eigenfunction values as a (count, n_points) array."""
        count = self.n_max + 1 if count is None else count
        return np.stack([f.values for f in self.eigenfunctions[:count]])


@dataclass(frozen=True, eq=False)
class FockVector:
    """Complex amplitudes over a truncated number basis.

    basis_tag records whether the coefficients refer to the base
    eigenstates or to the deformed ones; the ladder algebra is identical in
    both because the two bases are unitarily matched level by level.
    truncation_loss accumulates squared amplitude dropped past the top
    level by raising operations.
    """

    amplitudes: np.ndarray
    basis_tag: str = PSI_TAG
    truncation_loss: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("amplitudes must be a non-empty 1-D vector")
        if self.basis_tag not in (PSI_TAG, THETA_TAG):
            raise ValueError(f"unknown basis tag {self.basis_tag!r}")
        object.__setattr__(self, "amplitudes", a)

    @property
    def size(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_tag(self, tag: str) -> "FockVector":
        return replace(self, basis_tag=tag)


def build_oscillator_basis(grid: Grid, n_max: int) -> BasisSet:
    """Normalized oscillator eigenfunctions by the stable three-term recurrence.

    psi_0 = pi^(-1/4) exp(-x^2/2), then
    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1},
    which keeps every factor O(1) (no Hermite-polynomial overflow).
    Energies are n + 1/2 and W(x) = x (hbar = m = omega = 1).
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    # classical turning point sqrt(2 n_max + 1) plus a decay margin must fit
    half_width = min(grid.x_max, -grid.x_min)
    needed = math.sqrt(2.0 * n_max + 1.0) + 2.0
    if needed > half_width:
        raise ValueError(
            f"grid too narrow: top state needs half-width >= {needed:.2f}, grid gives {half_width:.2f}"
        )
    x = grid.x
    funcs = np.zeros((n_max + 1, grid.n_points))
    funcs[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        funcs[1] = math.sqrt(2.0) * x * funcs[0]
    for n in range(1, n_max):
        funcs[n + 1] = math.sqrt(2.0 / (n + 1)) * x * funcs[n] - math.sqrt(n / (n + 1.0)) * funcs[n - 1]
    eigenfunctions = tuple(SampledFunction(grid, funcs[n]) for n in range(n_max + 1))
    energies = np.arange(n_max + 1, dtype=np.float64) + 0.5
    return BasisSet(
        grid=grid,
        n_max=n_max,
        eigenfunctions=eigenfunctions,
        energies=energies,
        W=SampledFunction(grid, x.copy()),
        E0=0.5,
    )


def lower_amplitudes(values: np.ndarray) -> np.ndarray:
    """Array-level lowering: out_n = sqrt(n+1) * c_{n+1}, top set to zero."""
    out = np.zeros_like(values)
    n = values.size
    out[: n - 1] = np.sqrt(np.arange(1.0, n)) * values[1:]
    return out


def raise_amplitudes(values: np.ndarray):
    """Array-level raising: out_n = sqrt(n) * c_{n-1}.

    Returns (out, lost) where lost is the squared magnitude of the
    amplitude that would have landed past the truncation edge.
    """
    out = np.zeros_like(values)
    n = values.size
    out[1:] = np.sqrt(np.arange(1.0, n)) * values[: n - 1]
    lost = float(n) * float(np.abs(values[n - 1]) ** 2)
    return out, lost


def apply_lowering(c: FockVector) -> FockVector:
    """Annihilation action on the coefficient vector (tag preserved)."""
    return FockVector(lower_amplitudes(c.amplitudes), c.basis_tag, c.truncation_loss)


def apply_raising(c: FockVector) -> FockVector:
    """Creation action; amplitude pushed past the top level is dropped and
    its squared magnitude added to truncation_loss."""
    out, lost = raise_amplitudes(c.amplitudes)
    return FockVector(out, c.basis_tag, c.truncation_loss + lost)


def quadrature_moments(c: FockVector):
    """Means and variances of the conjugate quadratures X and P.

    X = (A' + A)/sqrt(2), P = i(A' - A)/sqrt(2) evaluated algebraically
    from ladder matrix elements, so the same code serves both basis tags.
    Returns (meanX, meanP, varX, varP).
    """
    a = c.amplitudes
    nrm2 = float(np.sum(np.abs(a) ** 2))
    if abs(nrm2 - 1.0) > _NORM_ATOL:
        raise ValueError(f"input must be normalized: |c|^2 = {nrm2!r}")
    n = np.arange(a.size, dtype=np.float64)
    mean_a = np.sum(np.conj(a[:-1]) * np.sqrt(n[1:]) * a[1:]) if a.size > 1 else 0.0 + 0.0j
    if a.size > 2:
        k = n[: a.size - 2]
        mean_a2 = np.sum(np.conj(a[:-2]) * np.sqrt((k + 1.0) * (k + 2.0)) * a[2:])
    else:
        mean_a2 = 0.0 + 0.0j
    mean_n = float(np.sum(n * np.abs(a) ** 2))
    mean_x = math.sqrt(2.0) * float(np.real(mean_a))
    mean_p = math.sqrt(2.0) * float(np.imag(mean_a))
    x2 = 0.5 * (1.0 + 2.0 * mean_n + 2.0 * float(np.real(mean_a2)))
    p2 = 0.5 * (1.0 + 2.0 * mean_n - 2.0 * float(np.real(mean_a2)))
    return mean_x, mean_p, x2 - mean_x**2, p2 - mean_p**2


def save_basis_csv(basis: BasisSet, csv_path, energies_path) -> None:
    """Write the basis import format: CSV `x, W, psi0, psi1, ...` plus a
    JSON sidecar {"energies": [...]}."""
    from .io import format_float, write_text_atomic

    header = ["x", "W"] + [f"psi{n}" for n in range(basis.n_max + 1)]
    cols = [basis.grid.x, basis.W.values] + [f.values for f in basis.eigenfunctions]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(format_float(v) for v in row))
    write_text_atomic(csv_path, "\n".join(lines) + "\n")
    write_text_atomic(
        energies_path,
        json.dumps({"energies": [float(e) for e in basis.energies]}, sort_keys=True) + "\n",
    )


def load_basis_csv(csv_path, energies_path) -> BasisSet:
    """Load a basis from the CSV + energies-sidecar import format."""
    with open(csv_path, "r", encoding="utf-8") as fh:
        header = [name.strip() for name in fh.readline().strip().split(",")]
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if header[:2] != ["x", "W"] or len(header) < 3:
        raise ValueError(f"basis CSV must start with columns x, W, psi0, ...; got {header[:3]}")
    x = data[:, 0]
    n_points = x.size
    if n_points < 3 or n_points % 2 == 0:
        raise ValueError(f"basis CSV needs an odd number of samples >= 3, got {n_points}")
    steps = np.diff(x)
    if steps.min() <= 0 or (steps.max() - steps.min()) > 1e-9 * steps.max():
        raise ValueError("basis CSV x column must be uniformly increasing")
    grid = make_grid(float(x[0]), float(x[-1]), n_points)
    with open(energies_path, "r", encoding="utf-8") as fh:
        energies = np.asarray(json.load(fh)["energies"], dtype=np.float64)
    n_states = len(header) - 2
    if energies.size != n_states:
        raise ValueError(f"{n_states} eigenfunction columns but {energies.size} energies")
    if np.any(np.diff(energies) <= 0):
        raise ValueError("energies must be strictly increasing")
    eigenfunctions = tuple(SampledFunction(grid, data[:, 2 + n].copy()) for n in range(n_states))
    return BasisSet(
        grid=grid,
        n_max=n_states - 1,
        eigenfunctions=eigenfunctions,
        energies=energies,
        W=SampledFunction(grid, data[:, 1].copy()),
        E0=float(energies[0]),
    )


def orthonormality_defect(basis: BasisSet, count: int | None = None) -> float:
    """Max entrywise deviation of the eigenfunction Gram matrix from identity."""
    from .numerics import simpson_weights

    funcs = basis.stack(count)
    w = simpson_weights(basis.grid)
    gram = (funcs * w) @ funcs.T
    return float(np.abs(gram - np.eye(funcs.shape[0])).max())
