"""Hot numeric kernels with numba-jitted and pure-numpy implementations.

The active backend is chosen once at import from the environment variable
``CYCLEPULSE_BACKEND``:

* ``auto`` (default): numba if importable, else numpy,
* ``numba``: require numba, raise if missing,
* ``numpy``: force the pure-numpy path.

Both implementations use the same left-to-right accumulation order for
reductions, so results are reproducible per backend and agree between
backends to rounding.  Benchmarks can reach either path directly through
NUMBA_IMPL / NUMPY_IMPL.
"""

from __future__ import annotations

import os

import numpy as np

_TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _ordered_mean_np(x: np.ndarray) -> float:
    # cumsum accumulates strictly left to right
    return float(np.cumsum(x)[-1]) / x.shape[0]


def _cumtrap_np(w: np.ndarray, dx: float):
    """Cumulative trapezoid over periodic samples.

    Returns (cum, total): cum[j] integrates from node 0 to node j and the
    total includes the wrap-around cell back to node 0.
    """
    n = w.shape[0]
    cells = (w[:-1] + w[1:]) * (0.5 * dx)
    cum = np.empty(n)
    cum[0] = 0.0
    np.cumsum(cells, out=cum[1:])
    total = cum[-1] + (w[-1] + w[0]) * (0.5 * dx)
    return cum, total


def _diff4_np(f: np.ndarray, dx: float) -> np.ndarray:
    return (8.0 * (np.roll(f, -1) - np.roll(f, 1))
            - (np.roll(f, -2) - np.roll(f, 2))) / (12.0 * dx)


def _catmull_rom_np(f: np.ndarray, q: np.ndarray) -> np.ndarray:
    n = f.shape[0]
    t = (q - np.floor(q)) * n
    j = np.floor(t).astype(np.int64)
    s = t - j
    j = j % n
    p0 = f[(j - 1) % n]
    p1 = f[j]
    p2 = f[(j + 1) % n]
    p3 = f[(j + 2) % n]
    return 0.5 * (2.0 * p1 + (p2 - p0) * s
                  + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s
                  + (3.0 * p1 - p0 - 3.0 * p2 + p3) * s * s * s)


def _trig_eval_np(cos_c: np.ndarray, sin_c: np.ndarray, q: np.ndarray) -> np.ndarray:
    k = np.arange(cos_c.shape[0])
    ang = _TWO_PI * q[:, None] * k[None, :]
    return (np.cos(ang) * cos_c + np.sin(ang) * sin_c).sum(axis=1)


def _pl_invert_np(samples: np.ndarray, winding: float, targets: np.ndarray) -> np.ndarray:
    m = samples.shape[0]
    ext = np.empty(m + 1)
    ext[:m] = samples
    ext[m] = samples[0] + winding
    shift = np.floor((targets - ext[0]) / winding)
    tau = targets - shift * winding
    il = np.searchsorted(ext, tau, side="left")
    ir = np.searchsorted(ext, tau, side="right")
    j = np.clip(ir - 1, 0, m - 1)
    den = ext[j + 1] - ext[j]
    safe = np.where(den > 0.0, den, 1.0)
    frac = np.where(den > 0.0, (tau - ext[j]) / safe, 0.0)
    xi = (j + frac) / m
    # exact hits on a flat run resolve to the midpoint of the run
    plateau = ir > il
    xi_plateau = 0.5 * (il + (ir - 1)) / m
    return np.where(plateau, xi_plateau, xi) + shift


NUMPY_IMPL = {
    "ordered_mean": _ordered_mean_np,
    "cumtrap": _cumtrap_np,
    "diff4": _diff4_np,
    "catmull_rom": _catmull_rom_np,
    "trig_eval": _trig_eval_np,
    "pl_invert": _pl_invert_np,
}


# ---------------------------------------------------------------------------
# numba implementations (loop form of the same arithmetic)
# ---------------------------------------------------------------------------

def _build_numba_impl():
    from numba import njit

    @njit(cache=True)
    def ordered_mean(x):
        acc = 0.0
        for i in range(x.shape[0]):
            acc = acc + x[i]
        return acc / x.shape[0]

    @njit(cache=True)
    def cumtrap(w, dx):
        n = w.shape[0]
        cum = np.empty(n)
        cum[0] = 0.0
        acc = 0.0
        for j in range(1, n):
            acc = acc + (w[j - 1] + w[j]) * (0.5 * dx)
            cum[j] = acc
        total = acc + (w[n - 1] + w[0]) * (0.5 * dx)
        return cum, total

    @njit(cache=True)
    def diff4(f, dx):
        n = f.shape[0]
        out = np.empty(n)
        d = 12.0 * dx
        for j in range(n):
            jm1 = (j - 1) % n
            jm2 = (j - 2) % n
            jp1 = (j + 1) % n
            jp2 = (j + 2) % n
            out[j] = (8.0 * (f[jp1] - f[jm1]) - (f[jp2] - f[jm2])) / d
        return out

    @njit(cache=True)
    def catmull_rom(f, q):
        n = f.shape[0]
        out = np.empty(q.shape[0])
        for i in range(q.shape[0]):
            t = (q[i] - np.floor(q[i])) * n
            j = int(np.floor(t))
            s = t - j
            j = j % n
            p0 = f[(j - 1) % n]
            p1 = f[j]
            p2 = f[(j + 1) % n]
            p3 = f[(j + 2) % n]
            out[i] = 0.5 * (2.0 * p1 + (p2 - p0) * s
                            + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s * s
                            + (3.0 * p1 - p0 - 3.0 * p2 + p3) * s * s * s)
        return out

    @njit(cache=True)
    def trig_eval(cos_c, sin_c, q):
        nk = cos_c.shape[0]
        out = np.empty(q.shape[0])
        for i in range(q.shape[0]):
            acc = 0.0
            base = _TWO_PI * q[i]
            for k in range(nk):
                ang = base * k
                acc = acc + cos_c[k] * np.cos(ang) + sin_c[k] * np.sin(ang)
            out[i] = acc
        return out

    @njit(cache=True)
    def _bisect(ext, x, left):
        lo = 0
        hi = ext.shape[0]
        while lo < hi:
            mid = (lo + hi) // 2
            if left:
                if ext[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            else:
                if x < ext[mid]:
                    hi = mid
                else:
                    lo = mid + 1
        return lo

    @njit(cache=True)
    def pl_invert(samples, winding, targets):
        m = samples.shape[0]
        ext = np.empty(m + 1)
        ext[:m] = samples
        ext[m] = samples[0] + winding
        out = np.empty(targets.shape[0])
        for i in range(targets.shape[0]):
            shift = np.floor((targets[i] - ext[0]) / winding)
            tau = targets[i] - shift * winding
            il = _bisect(ext, tau, True)
            ir = _bisect(ext, tau, False)
            if ir > il:
                xi = 0.5 * (il + (ir - 1)) / m
            else:
                j = ir - 1
                if j < 0:
                    j = 0
                elif j > m - 1:
                    j = m - 1
                den = ext[j + 1] - ext[j]
                if den > 0.0:
                    frac = (tau - ext[j]) / den
                else:
                    frac = 0.0
                xi = (j + frac) / m
            out[i] = xi + shift
        return out

    return {
        "ordered_mean": ordered_mean,
        "cumtrap": cumtrap,
        "diff4": diff4,
        "catmull_rom": catmull_rom,
        "trig_eval": trig_eval,
        "pl_invert": pl_invert,
    }


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

_REQUESTED = os.environ.get("CYCLEPULSE_BACKEND", "auto").lower()
if _REQUESTED not in ("auto", "numba", "numpy"):
    raise ValueError(f"CYCLEPULSE_BACKEND must be auto|numba|numpy, got {_REQUESTED!r}")

NUMBA_IMPL = None
if _REQUESTED in ("auto", "numba"):
    try:
        NUMBA_IMPL = _build_numba_impl()
    except ImportError:
        if _REQUESTED == "numba":
            raise

ACTIVE = NUMBA_IMPL if NUMBA_IMPL is not None else NUMPY_IMPL
BACKEND = "numba" if NUMBA_IMPL is not None else "numpy"

ordered_mean = ACTIVE["ordered_mean"]
cumtrap = ACTIVE["cumtrap"]
diff4 = ACTIVE["diff4"]
catmull_rom = ACTIVE["catmull_rom"]
trig_eval = ACTIVE["trig_eval"]
pl_invert = ACTIVE["pl_invert"]


def backend_name() -> str:
    return BACKEND
