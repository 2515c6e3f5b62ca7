"""Built-in initial-condition families.

All families are closed-form band-limited trigonometric profiles, so their
samples determine them exactly on any grid with n above twice the highest
mode.  Each profile carries its analytic derivative.
"""

from __future__ import annotations

import dataclasses
from typing import Callable

import numpy as np


@dataclasses.dataclass(frozen=True)
class Profile:
    name: str
    u0: Callable[[np.ndarray], np.ndarray]
    u0x: Callable[[np.ndarray], np.ndarray]


def zero() -> Profile:
    return Profile("zero", lambda x: np.zeros_like(x), lambda x: np.zeros_like(x))


def constant(value: float) -> Profile:
    return Profile(
        f"constant(value={value!r})",
        lambda x: np.full_like(x, float(value)),
        lambda x: np.zeros_like(x),
    )


def sine(amplitude: float, mode: int = 1) -> Profile:
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    if mode < 1:
        raise ValueError("mode must be at least 1")
    a, m = float(amplitude), int(mode)
    w = 2.0 * np.pi * m
    return Profile(
        f"sine(amplitude={a!r},mode={m})",
        lambda x: a * np.sin(w * x),
        lambda x: a * w * np.cos(w * x),
    )


def multisine(amplitudes, modes) -> Profile:
    amps = [float(a) for a in amplitudes]
    ms = [int(m) for m in modes]
    if len(amps) != len(ms):
        raise ValueError("amplitudes and modes must have equal length")
    if any(a < 0 for a in amps):
        raise ValueError("amplitudes must be nonnegative")
    if any(m < 1 for m in ms):
        raise ValueError("modes must be at least 1")

    def u0(x):
        out = np.zeros_like(x)
        for a, m in zip(amps, ms):
            out += a * np.sin(2.0 * np.pi * m * x)
        return out

    def u0x(x):
        out = np.zeros_like(x)
        for a, m in zip(amps, ms):
            out += a * 2.0 * np.pi * m * np.cos(2.0 * np.pi * m * x)
        return out

    label = ",".join(f"{a!r}*sin(2pi*{m}x)" for a, m in zip(amps, ms))
    return Profile(f"multisine({label})", u0, u0x)


def by_name(name: str, **params) -> Profile:
    if name == "zero":
        return zero()
    if name == "constant":
        return constant(params["value"])
    if name == "sine":
        return sine(params["amplitude"], params.get("mode", 1))
    if name == "multisine":
        return multisine(params["amplitudes"], params["modes"])
    raise ValueError(f"unknown profile family {name!r}")
