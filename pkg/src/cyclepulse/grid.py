"""Periodic-grid numerics on the unit circle.

A grid function is a length-n float array of samples f(j/n), period 1.
Quadrature is the node mean (composite trapezoid on the periodic grid),
antiderivatives are cumulative trapezoid with the mean projected out, and
differentiation defaults to 4th-order central differences with a spectral
variant selectable at run time.  Monotone degree-1 maps (winding maps) are
inverted by bracketing plus linear interpolation.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import kernels as kern
from .errors import NonMonotone

#: increments of an unwrapped monotone map may dip this far below zero
MONOTONE_TOL = 1e-12

#: module default for diff(); the CLI may switch it to "spectral"
DEFAULT_DIFF_METHOD = "fd4"


def grid_points(n: int) -> np.ndarray:
    """Nodes j/n of the uniform periodic grid."""
    return np.arange(n) / n


def as_samples(f) -> np.ndarray:
    x = np.ascontiguousarray(f, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("grid function must be one-dimensional")
    return x


def quad_period(f) -> float:
    """Integral over one period: the node mean, exact for low harmonics."""
    return kern.ordered_mean(as_samples(f))


def inv_deriv(f) -> np.ndarray:
    """Antiderivative of the mean-zero projection, vanishing at node 0.

    The output is periodic because the mean is removed before the
    cumulative trapezoid.
    """
    x = as_samples(f)
    w = x - quad_period(x)
    cum, _total = kern.cumtrap(w, 1.0 / x.shape[0])
    return cum


def inv_deriv_closure(f) -> float:
    """Wrap-around defect of inv_deriv; zero up to rounding."""
    x = as_samples(f)
    w = x - quad_period(x)
    _cum, total = kern.cumtrap(w, 1.0 / x.shape[0])
    return float(total)


def set_default_diff_method(method: str) -> None:
    global DEFAULT_DIFF_METHOD
    if method not in ("fd4", "spectral"):
        raise ValueError(f"unknown diff method {method!r}")
    DEFAULT_DIFF_METHOD = method


def diff(f, method: str | None = None) -> np.ndarray:
    """Periodic derivative: 4th-order central stencil or discrete Fourier."""
    x = as_samples(f)
    m = method or DEFAULT_DIFF_METHOD
    if m == "fd4":
        return kern.diff4(x, 1.0 / x.shape[0])
    if m == "spectral":
        n = x.shape[0]
        fh = np.fft.rfft(x)
        k = np.arange(fh.shape[0])
        fh = fh * (2j * np.pi * k)
        if n % 2 == 0:
            fh[-1] = 0.0  # Nyquist mode has no odd derivative
        return np.fft.irfft(fh, n)
    raise ValueError(f"unknown diff method {m!r}")


def interp(f, xi) -> float | np.ndarray:
    """Periodic cubic (Catmull-Rom) interpolation; exact at the nodes."""
    x = as_samples(f)
    q = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    out = kern.catmull_rom(x, np.ascontiguousarray(q))
    return float(out[0]) if np.isscalar(xi) or np.ndim(xi) == 0 else out


def trig_coefficients(f) -> tuple[np.ndarray, np.ndarray]:
    """Cos/sin coefficients of the trigonometric interpolant of f."""
    x = as_samples(f)
    n = x.shape[0]
    c = np.fft.rfft(x) / n
    cos_c = 2.0 * c.real
    sin_c = -2.0 * c.imag
    cos_c[0] = c[0].real
    sin_c[0] = 0.0
    if n % 2 == 0:
        cos_c[-1] = c[-1].real
        sin_c[-1] = 0.0
    return np.ascontiguousarray(cos_c), np.ascontiguousarray(sin_c)


def trig_interp(f, xi) -> float | np.ndarray:
    """Trigonometric interpolation at arbitrary points.

    Spectrally accurate for smooth samples and exact for band-limited
    profiles; used where construction accuracy matters more than locality.
    """
    cos_c, sin_c = trig_coefficients(f)
    q = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    out = kern.trig_eval(cos_c, sin_c, np.ascontiguousarray(q))
    return float(out[0]) if np.isscalar(xi) or np.ndim(xi) == 0 else out


def trig_resample(f, m: int) -> np.ndarray:
    """Trigonometric interpolation of f onto a uniform grid of size m."""
    x = as_samples(f)
    n = x.shape[0]
    return np.fft.irfft(np.fft.rfft(x), m) * (m / n)


@dataclasses.dataclass(frozen=True)
class MonotoneMap:
    """Samples of a monotone map m with m(xi + 1) = m(xi) + winding.

    tol is the largest tolerated dip of an unwrapped increment; evolved
    characteristic maps pass a looser value because discretization noise
    around a vanishing derivative (wave breaking) dips below the default.
    """

    samples: np.ndarray
    winding: float = 1.0
    tol: float = MONOTONE_TOL

    def __post_init__(self):
        s = as_samples(self.samples)
        object.__setattr__(self, "samples", s)
        if not self.winding > 0.0:
            raise NonMonotone(f"winding must be positive, got {self.winding}")
        inc = np.empty(s.shape[0])
        inc[:-1] = s[1:] - s[:-1]
        inc[-1] = s[0] + self.winding - s[-1]
        worst = float(inc.min())
        if worst < -self.tol:
            raise NonMonotone(f"unwrapped map decreases by {-worst:.3e}")

    @property
    def n(self) -> int:
        return self.samples.shape[0]


def invert_monotone(m: MonotoneMap, target) -> float | np.ndarray:
    """Solve m(xi) = target by node bracketing and linear interpolation.

    Flat runs hit exactly resolve to their midpoint.  The return value is
    unwrapped: targets outside the principal branch come back shifted by
    the matching integer multiple of 1.
    """
    t = np.atleast_1d(np.asarray(target, dtype=np.float64))
    out = kern.pl_invert(m.samples, float(m.winding), np.ascontiguousarray(t))
    return float(out[0]) if np.isscalar(target) or np.ndim(target) == 0 else out


def eval_monotone(m: MonotoneMap, xi) -> float | np.ndarray:
    """Piecewise-linear evaluation of the map, for inversion round trips."""
    q = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    shift = np.floor(q)
    frac = (q - shift) * m.n
    j = np.minimum(frac.astype(np.int64), m.n - 1)
    s = frac - j
    ext = np.append(m.samples, m.samples[0] + m.winding)
    out = ext[j] + (ext[j + 1] - ext[j]) * s + shift * m.winding
    return float(out[0]) if np.isscalar(xi) or np.ndim(xi) == 0 else out
