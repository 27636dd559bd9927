"""Sinusoidal spectra ``(f0, a_n, b_n)`` with ``w_n = n*pi/L``.

Coefficients come from segment-wise adaptive quadrature of the exact piecewise
expressions; there are no closed-form shortcuts on this path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quadrature
from .piecewise import PiecewiseFunction

# harmonics integrated together in one quadrature call
BLOCK = 32


def _frozen(v) -> np.ndarray:
    arr = np.array(v, dtype=float).ravel()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SinSpectrum:
    L: float
    f0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a, b = _frozen(self.a), _frozen(self.b)
        if a.shape != b.shape:
            raise ValueError("a and b must have the same length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.isfinite(self.f0)):
            raise ValueError("spectrum entries must be finite")
        if not self.L > 0:
            raise ValueError("half-period must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "f0", float(self.f0))
        object.__setattr__(self, "L", float(self.L))

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def omega(self) -> np.ndarray:
        return np.arange(1, self.N + 1) * np.pi / self.L

    @classmethod
    def zeros(cls, L: float, N: int) -> SinSpectrum:
        return cls(L, 0.0, np.zeros(N), np.zeros(N))

    def truncate(self, N: int) -> SinSpectrum:
        if N > self.N:
            raise ValueError(f"spectrum only has {self.N} terms")
        return SinSpectrum(self.L, self.f0, self.a[:N], self.b[:N])

    def __call__(self, x):
        return eval_series(self, x)

    def power(self) -> float:
        """Mean square implied by the coefficients, ``f0^2 + sum(a^2+b^2)/2``."""
        return self.f0**2 + 0.5 * float(np.sum(self.a**2 + self.b**2))


def compute_spectrum(f: PiecewiseFunction, N: int, *, abs_tol: float = 1e-11) -> SinSpectrum:
    """Euler coefficients of ``f`` up to order ``N``.

    Each smooth segment is pre-split so that no subinterval spans more than
    half an oscillation of the highest weight in the block.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    L = f.L
    f0 = f.integral(abs_tol=abs_tol * L) / (2.0 * L)
    a = np.empty(N)
    b = np.empty(N)
    for start in range(1, N + 1, BLOCK):
        ns = np.arange(start, min(start + BLOCK, N + 1))
        w = ns * np.pi / L

        def weight(x, w=w):
            wx = np.outer(x, w)
            return np.concatenate([np.cos(wx), np.sin(wx)], axis=1)

        vals = f.integral(weight, max_width=L / ns[-1], abs_tol=abs_tol * L)
        k = len(ns)
        a[start - 1:start - 1 + k] = vals[:k] / L
        b[start - 1:start - 1 + k] = vals[k:] / L
    return SinSpectrum(L, f0, a, b)


def eval_series(s: SinSpectrum, x):
    """``f0 + sum_n a_n cos(w_n x) + b_n sin(w_n x)``."""
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    wx = np.outer(flat, s.omega)
    out = s.f0 + np.cos(wx) @ s.a + np.sin(wx) @ s.b
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def differentiate(s: SinSpectrum, f_o_at_L: float) -> SinSpectrum:
    """Spectrum of ``f'`` given the odd part's value at ``L``.

    The periodic extension of ``f`` jumps by ``2 f_o(L)`` at ``x = L``; this is
    removed by the ramp ``x f_o(L)/L``, whose derivative is the returned mean
    and whose sine coefficients feed the cosine terms of the result.
    """
    w = s.omega
    n = np.arange(1, s.N + 1)
    ramp = float(f_o_at_L) / s.L
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    a_new = s.b * w + 2.0 * sign * ramp
    b_new = -s.a * w
    return SinSpectrum(s.L, ramp, a_new, b_new)


def integrate(s: SinSpectrum, d0: float = 0.0):
    """Term-by-term antiderivative.

    Returns ``(ramp, spectrum)`` where the antiderivative is
    ``ramp*x + spectrum(x)``; ``ramp`` is the input mean and the spectrum's mean
    is ``d0``.
    """
    w = s.omega
    return s.f0, SinSpectrum(s.L, d0, -s.b / w, s.a / w)
