"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

The only kernel hot enough to matter is the Sturm-sequence bisection
eigensolver: its pivot recurrence is sequential in the matrix index, so it
cannot be vectorized along that axis.  The numba path runs the textbook
scalar loops; the numpy path batches the bisection over all requested
eigenvalues so the Python-level loop only runs once per matrix row.  Both
paths execute the identical IEEE arithmetic per root (no fastmath), so
their outputs are bitwise identical.

Backend selection is controlled by the ISOSPEC_NUMBA environment variable,
read at call time:

    unset / "auto"  use numba when importable, else numpy
    "1" / "on"      require numba (error if not importable)
    "0" / "off"     force the numpy fallback
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

_RELTOL = 1e-12  # relative interval width at convergence (contract: 1e-10)
_MAXIT = 200

_TRUTHY = ("1", "on", "true", "yes", "numba")
_FALSY = ("0", "off", "false", "no", "numpy")


def numba_available() -> bool:
    return numba is not None


def active_backend(override: str | None = None) -> str:
    """Resolve the kernel backend to "numba" or "numpy".

    `override` takes precedence over the ISOSPEC_NUMBA environment
    variable; both accept the same spellings.
    """
    raw = override if override is not None else os.environ.get("ISOSPEC_NUMBA", "auto")
    val = str(raw).strip().lower()
    if val in _FALSY:
        return "numpy"
    if val in _TRUTHY:
        if numba is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return "numba"
    if val in ("", "auto"):
        return "numba" if numba is not None else "numpy"
    raise ValueError(f"unrecognized backend selector {raw!r}")


def _bisection_bounds(diagonal: np.ndarray, off_diagonal: np.ndarray):
    """Gershgorin interval and pivot floor for the bisection."""
    radius = np.zeros_like(diagonal)
    ae = np.abs(off_diagonal)
    if ae.size:
        radius[:-1] += ae
        radius[1:] += ae
    gl = float(np.min(diagonal - radius))
    gu = float(np.max(diagonal + radius))
    pivmin = max(float(np.max(off_diagonal * off_diagonal, initial=0.0)), 1.0) * np.finfo(np.float64).tiny
    pad = 2.0 * np.finfo(np.float64).eps * max(abs(gl), abs(gu), 1.0) + 2.0 * pivmin
    return gl - pad, gu + pad, pivmin


def _sturm_lowest_serial(d, e2, k, gl, gu, pivmin):
    """Scalar bisection for the k smallest eigenvalues (numba target)."""
    m = d.shape[0]
    out = np.empty(k)
    for j in range(k):
        lo = gl
        hi = gu
        for _ in range(_MAXIT):
            tol = _RELTOL * max(abs(lo), abs(hi))
            if tol < 2.0 * pivmin:
                tol = 2.0 * pivmin
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            # Sturm count: eigenvalues of the leading principal minors
            # strictly below `mid`, via the LDL^T pivot recurrence.
            cnt = 0
            q = 1.0
            for i in range(m):
                if i == 0:
                    q = d[0] - mid
                else:
                    q = d[i] - mid - e2[i - 1] / q
                if abs(q) < pivmin:
                    q = -pivmin
                if q < 0.0:
                    cnt += 1
            if cnt >= j + 1:
                hi = mid
            else:
                lo = mid
        out[j] = 0.5 * (lo + hi)
    return out


if numba is not None:
    _sturm_lowest_njit = numba.njit(cache=True)(_sturm_lowest_serial)
else:  # pragma: no cover
    _sturm_lowest_njit = None


def _sturm_lowest_batched(d, e2, k, gl, gu, pivmin):
    """Numpy fallback: same bisection, batched across the k roots.

    Each root's (lo, hi) sequence is identical to the serial path, so the
    result is bitwise identical.
    """
    lo = np.full(k, gl)
    hi = np.full(k, gu)
    want = np.arange(1, k + 1)
    m = d.shape[0]
    for _ in range(_MAXIT):
        tol = np.maximum(_RELTOL * np.maximum(np.abs(lo), np.abs(hi)), 2.0 * pivmin)
        active = (hi - lo) > tol
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        active &= (mid > lo) & (mid < hi)
        if not active.any():
            break
        sig = mid[active]
        q = d[0] - sig
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        cnt = (q < 0.0).astype(np.int64)
        for i in range(1, m):
            q = d[i] - sig - e2[i - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            cnt += q < 0.0
        go_hi = cnt >= want[active]
        idx = np.flatnonzero(active)
        hi[idx[go_hi]] = sig[go_hi]
        lo[idx[~go_hi]] = sig[~go_hi]
    return 0.5 * (lo + hi)


def sturm_lowest(diagonal, off_diagonal, k: int, backend: str | None = None) -> np.ndarray:
    """k smallest eigenvalues of a symmetric tridiagonal matrix, ascending.

    Pure bisection on the Sturm count; deterministic and reproducible to
    the bit for fixed inputs, independent of the backend.
    """
    d = np.ascontiguousarray(diagonal, dtype=np.float64)
    e = np.ascontiguousarray(off_diagonal, dtype=np.float64)
    e2 = e * e
    gl, gu, pivmin = _bisection_bounds(d, e)
    if active_backend(backend) == "numba":
        return _sturm_lowest_njit(d, e2, k, gl, gu, pivmin)
    return _sturm_lowest_batched(d, e2, k, gl, gu, pivmin)
