"""Coherent and squeezed-coherent states of the deformed family.

Coefficient-space constructions are exact ladder algebra and identical in
the base and deformed number bases; coordinate-space wavefunctions are
synthesized over the deformed eigenfunctions.  Displacing by z and then
deforming equals deforming and then displacing with the transformed
operators, which is why a single Poisson amplitude vector serves both.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .basis import (
    PSI_TAG,
    THETA_TAG,
    FockVector,
    lower_amplitudes,
    raise_amplitudes,
)
from .deform import Deformation
from .numerics import SampledFunction, first_derivative, simpson_weights

__all__ = [
    "DisplacementParameter",
    "SqueezeParameter",
    "coherent_coefficients",
    "deformed_coherent_wavefunction",
    "wavefunction_from_coefficients",
    "annihilation_residual",
    "squeezed_coefficients",
    "physical_uncertainties",
    "coherent_overlap",
    "save_state_csv",
    "save_state_json",
    "load_state_csv",
    "load_state_json",
]

_SERIES_TOL = 1e-14
_SERIES_MAX_TERMS = 1000
_NORM_GATE = 1e-6


@dataclass(frozen=True)
class DisplacementParameter:
    """Phase-space displacement label z (dimensionless)."""

    z: complex

    def required_levels(self) -> float:
        """Truncation needed to keep the Poisson tail below ~1e-8."""
        r = abs(self.z)
        return r * r + 3.0 * r + 3.0

    def check_truncation(self, N: int) -> None:
        need = self.required_levels()
        if need > N:
            raise ValueError(
                f"truncation too small: |z|^2 + 3|z| + 3 = {need:.2f} exceeds N = {N}"
            )


@dataclass(frozen=True)
class SqueezeParameter:
    """Squeeze label xi = r * exp(i phi) with r >= 0."""

    xi: complex

    @property
    def r(self) -> float:
        return abs(self.xi)

    def check_magnitude(self) -> None:
        if self.r > 1.0:
            raise ValueError(
                f"squeeze magnitude r = {self.r:.3f} exceeds 1; truncation adequacy not guaranteed"
            )


def _as_displacement(z) -> DisplacementParameter:
    return z if isinstance(z, DisplacementParameter) else DisplacementParameter(complex(z))


def _as_squeeze(xi) -> SqueezeParameter:
    return xi if isinstance(xi, SqueezeParameter) else SqueezeParameter(complex(xi))


def coherent_coefficients(z, N: int, basis_tag: str = PSI_TAG) -> FockVector:
    """Poisson amplitudes c_n = exp(-|z|^2/2) z^n / sqrt(n!) via the stable
    ratio recurrence c_{n+1} = c_n z / sqrt(n+1)."""
    zp = _as_displacement(z)
    zp.check_truncation(N)
    c = np.zeros(int(N), dtype=np.complex128)
    c[0] = math.exp(-abs(zp.z) ** 2 / 2.0)
    for n in range(int(N) - 1):
        c[n + 1] = c[n] * zp.z / math.sqrt(n + 1.0)
    nrm2 = float(np.sum(np.abs(c) ** 2))
    if abs(nrm2 - 1.0) > 1e-8:
        raise ValueError(f"truncation too small: captured norm^2 = {nrm2!r} not within 1e-8 of 1")
    return FockVector(c, basis_tag)


def wavefunction_from_coefficients(c: FockVector, d: Deformation) -> SampledFunction:
    """Coordinate-space synthesis sum_n c_n theta_n(x) over the deformed basis."""
    if c.size > len(d.theta):
        raise ValueError(
            f"truncation too small: need {c.size} deformed states, basis holds {len(d.theta)}"
        )
    theta = np.stack([f.values for f in d.theta[: c.size]])
    return SampledFunction(d.basis.grid, c.amplitudes @ theta)


def deformed_coherent_wavefunction(z, d: Deformation, N: int) -> SampledFunction:
    """Coherent state of the deformed family in coordinate representation.

    The coefficient map between the two families is level-by-level, so the
    deformed coherent state is the Poisson vector synthesized over theta_n.
    """
    c = coherent_coefficients(z, N, basis_tag=THETA_TAG)
    return wavefunction_from_coefficients(c, d)


def annihilation_residual(z, N: int) -> float:
    """Norm of (A - z) applied to the deformed coherent coefficient vector.

    The eigenvalue z does not depend on the deformation parameter; at finite
    truncation the residual equals the dropped Poisson tail amplitude.
    """
    c = coherent_coefficients(z, N, basis_tag=THETA_TAG)
    zp = _as_displacement(z)
    resid = lower_amplitudes(c.amplitudes) - zp.z * c.amplitudes
    return float(np.linalg.norm(resid))


def squeezed_coefficients(xi, z, N: int, basis_tag: str = PSI_TAG) -> FockVector:
    """Coefficients of the squeezed displaced ground state.

    Applies exp(xi/2 * (A')^2 - conj(xi)/2 * A^2) to the coherent vector as
    a power series of ladder actions, summed until the appended term's norm
    drops below 1e-14, then renormalized.  The truncated generator stays
    exactly anti-Hermitian, so the series preserves norm to roundoff; the
    r <= 1 gate is what keeps the edge amplitudes it cannot faithfully
    evolve negligible.  With this sign convention a real positive xi
    stretches the X quadrature by e^r.
    """
    xip = _as_squeeze(xi)
    xip.check_magnitude()
    coherent = coherent_coefficients(z, N, basis_tag=basis_tag)
    if xip.xi == 0:
        return coherent
    half_xi = 0.5 * xip.xi
    half_xi_c = 0.5 * xip.xi.conjugate()
    acc = coherent.amplitudes.copy()
    term = coherent.amplitudes.copy()
    for k in range(1, _SERIES_MAX_TERMS + 1):
        up, _ = raise_amplitudes(term)
        up, _ = raise_amplitudes(up)
        down = lower_amplitudes(lower_amplitudes(term))
        term = (half_xi * up - half_xi_c * down) / k
        acc = acc + term
        if float(np.linalg.norm(term)) < _SERIES_TOL:
            break
    else:
        raise ValueError(
            f"squeeze series did not converge within {_SERIES_MAX_TERMS} terms (|xi| too large for N={N})"
        )
    acc = acc / np.linalg.norm(acc)
    return FockVector(acc, basis_tag)


def physical_uncertainties(psi: SampledFunction):
    """Position/momentum spreads of a normalized coordinate-space state.

    Uses quadrature moments of x and the fourth-order grid derivative for
    the momentum moments: <p> = Im <psi|psi'>, <p^2> = |psi'|^2 integral.
    Returns (dx, dp, dx*dp).
    """
    v = np.asarray(psi.values, dtype=np.complex128)
    w = simpson_weights(psi.grid)
    nrm2 = float(np.real(w @ (np.conj(v) * v)))
    if abs(math.sqrt(nrm2) - 1.0) > _NORM_GATE:
        raise ValueError(f"input must be normalized on its grid: norm = {math.sqrt(nrm2)!r}")
    x = psi.grid.x
    dv = first_derivative(v, psi.grid.h, order=4)
    density = np.real(np.conj(v) * v)
    mean_x = float(w @ (x * density))
    mean_x2 = float(w @ (x * x * density))
    mean_p = float(np.real(w @ (np.conj(v) * (-1j) * dv)))
    mean_p2 = float(np.real(w @ (np.conj(dv) * dv)))
    # clamp: roundoff can push a zero variance a few ulp negative
    dx = math.sqrt(max(mean_x2 - mean_x * mean_x, 0.0))
    dp = math.sqrt(max(mean_p2 - mean_p * mean_p, 0.0))
    return dx, dp, dx * dp


def coherent_overlap(z1, z2) -> complex:
    """Closed-form overlap <z1|z2> = exp(-(|z1|^2+|z2|^2)/2 + conj(z1) z2),
    invariant under the deformation."""
    a = _as_displacement(z1).z
    b = _as_displacement(z2).z
    return cmath.exp(-(abs(a) ** 2 + abs(b) ** 2) / 2.0 + a.conjugate() * b)


def save_state_csv(psi: SampledFunction, path) -> None:
    """CSV export with columns x, re_psi, im_psi."""
    from .io import format_float, write_text_atomic

    v = np.asarray(psi.values, dtype=np.complex128)
    lines = ["x,re(psi),im(psi)"]
    for xi_, re_, im_ in zip(psi.grid.x, v.real, v.imag):
        lines.append(f"{format_float(xi_)},{format_float(re_)},{format_float(im_)}")
    write_text_atomic(path, "\n".join(lines) + "\n")


def save_state_json(psi: SampledFunction, path, metadata: dict) -> None:
    """JSON export carrying the state plus run metadata (lambda, z, xi, N, grid)."""
    from .io import dumps_canonical, write_text_atomic

    v = np.asarray(psi.values, dtype=np.complex128)
    payload = dict(metadata)
    payload["grid"] = {
        "x_min": psi.grid.x_min,
        "x_max": psi.grid.x_max,
        "n_points": psi.grid.n_points,
    }
    payload["x"] = [float(t) for t in psi.grid.x]
    payload["psi_re"] = [float(t) for t in v.real]
    payload["psi_im"] = [float(t) for t in v.imag]
    write_text_atomic(path, dumps_canonical(payload))


def load_state_csv(path):
    """Read back a state CSV as (x, complex values)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def load_state_json(path):
    """Read back a state JSON as (payload dict, x, complex values)."""
    import json

    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    x = np.asarray(payload["x"], dtype=np.float64)
    v = np.asarray(payload["psi_re"], dtype=np.float64) + 1j * np.asarray(payload["psi_im"], dtype=np.float64)
    return payload, x, v
