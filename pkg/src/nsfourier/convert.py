"""Conversion between sinusoidal spectra and dilated-harmonic expansions.

A generator ``g`` with cosine coefficients ``c`` has harmonics
``g_n(x) - g0 = sum_k c_k cos(k n w_1 x)``, so expanding ``f = f0 + sum A_n (g_n - g0)``
means solving the Dirichlet-convolution system ``a_m = sum_{n | m} A_n c_{m/n}``.
The system is lower triangular in ``m`` and is solved by forward substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingGeneratorError, ParityError, SingularBasisError
from .expr import PI, X, Const, Func, div, mul
from .piecewise import PiecewiseFunction
from .spectrum import SinSpectrum, compute_spectrum

UNIT_EPS = 1e-12
PARITY_TOL = 1e-9


def _as_array(v, N: int, what: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float).ravel()
    if len(arr) < N:
        raise ValueError(f"{what} has {len(arr)} terms, need {N}")
    return arr[:N]


def dirichlet_solve(target, gen, N: int | None = None) -> np.ndarray:
    """Solve ``sum_{n*i = m} A_n gen_i = target_m`` for ``m = 1..N``."""
    if N is None:
        N = min(len(target), len(gen))
    t = _as_array(target, N, "target")
    g = _as_array(gen, N, "generator")
    scale = float(np.max(np.abs(g))) if N else 0.0
    if not abs(g[0]) > UNIT_EPS * scale:
        raise SingularBasisError(
            f"leading generator coefficient {g[0]!r} is too small to solve against"
        )
    A = np.zeros(N)
    inv = 1.0 / g[0]
    # A_m = (t_m - sum_{n | m, n < m} A_n g_{m/n}) / g_1, accumulated by scattering
    # each finished A_n onto its multiples
    acc = t.copy()
    for n in range(1, N + 1):
        A[n - 1] = acc[n - 1] * inv
        if A[n - 1] != 0.0:
            for k in range(2, N // n + 1):
                acc[n * k - 1] -= A[n - 1] * g[k - 1]
    return A


def dirichlet_multiply(A, gen, N: int | None = None) -> np.ndarray:
    """``(A * gen)_m = sum_{n | m} A_n gen_{m/n}`` for ``m = 1..N``."""
    if N is None:
        N = min(len(A), len(gen))
    u = _as_array(A, N, "coefficients")
    g = _as_array(gen, N, "generator")
    out = np.zeros(N)
    for n in range(1, N + 1):
        if u[n - 1] != 0.0:
            k = np.arange(1, N // n + 1)
            out[n * k - 1] += u[n - 1] * g[k - 1]
    return out


@dataclass(frozen=True, eq=False)
class Generator:
    """One generator: its sinusoidal spectrum and, when known, the function itself."""

    spectrum: SinSpectrum
    function: PiecewiseFunction | None = None

    @property
    def g0(self) -> float:
        return self.spectrum.f0


def _check_parity(s: SinSpectrum, parity: str, what: str):
    scale = max(1.0, float(np.max(np.abs(np.concatenate([s.a, s.b, [s.f0]])))))
    if parity == "even":
        bad = float(np.max(np.abs(s.b))) if s.N else 0.0
    else:
        bad = max(float(np.max(np.abs(s.a))) if s.N else 0.0, abs(s.f0))
    if bad > PARITY_TOL * scale:
        raise ParityError(f"{what} is not {parity} (stray component {bad:.3g})")


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    """An even and/or an odd generator sharing the half-period ``L``."""

    even: Generator | None = None
    odd: Generator | None = None

    def __post_init__(self):
        if self.even is None and self.odd is None:
            raise ValueError("a basis needs at least one generator")
        if self.even is not None:
            _check_parity(self.even.spectrum, "even", "even generator")
        if self.odd is not None:
            _check_parity(self.odd.spectrum, "odd", "odd generator")
        if self.even is not None and self.odd is not None:
            if not np.isclose(self.even.spectrum.L, self.odd.spectrum.L, rtol=1e-12):
                raise ValueError("generators have different half-periods")

    @property
    def L(self) -> float:
        return (self.even or self.odd).spectrum.L

    @property
    def g0(self) -> float:
        return self.even.g0 if self.even is not None else 0.0

    @property
    def c(self) -> np.ndarray:
        return self.even.spectrum.a

    @property
    def d(self) -> np.ndarray:
        return self.odd.spectrum.b

    @property
    def N(self) -> int:
        return min(g.spectrum.N for g in (self.even, self.odd) if g is not None)

    @classmethod
    def from_functions(cls, even: PiecewiseFunction | None = None,
                       odd: PiecewiseFunction | None = None, *, N: int) -> GeneratorBasis:
        """Compute the generator spectra by quadrature."""
        ev = Generator(compute_spectrum(even, N), even) if even is not None else None
        od = Generator(compute_spectrum(odd, N), odd) if odd is not None else None
        return cls(ev, od)

    @classmethod
    def from_mixed(cls, g: PiecewiseFunction, *, N: int) -> GeneratorBasis:
        """Split a generator of no particular parity into its even and odd parts.

        The even part is ``(g(x)+g(-x))/2 - g0`` (zero mean); expansions in this
        basis map back onto ``g_n(x) - g0`` and ``g_n(-x) - g0`` via
        :func:`combine_general`.
        """
        _, even, odd = g.parity_split()
        return cls.from_functions(even, odd, N=N)

    @classmethod
    def from_spectra(cls, c=None, d=None, *, L: float, g0: float = 0.0) -> GeneratorBasis:
        """Basis given only by closed-form generator coefficients."""
        ev = od = None
        if c is not None:
            c = np.asarray(c, dtype=float)
            ev = Generator(SinSpectrum(L, g0, c, np.zeros_like(c)))
        if d is not None:
            d = np.asarray(d, dtype=float)
            od = Generator(SinSpectrum(L, 0.0, np.zeros_like(d), d))
        return cls(ev, od)

    @classmethod
    def sinusoidal(cls, L: float, N: int) -> GeneratorBasis:
        unit = np.zeros(N)
        unit[0] = 1.0
        w = div(mul(PI, X), Const(float(L)))
        cos_fn = PiecewiseFunction((-L, L), (Func("cos", w),))
        sin_fn = PiecewiseFunction((-L, L), (Func("sin", w),))
        zero = np.zeros(N)
        return cls(Generator(SinSpectrum(L, 0.0, unit, zero), cos_fn),
                   Generator(SinSpectrum(L, 0.0, zero, unit), sin_fn))


@dataclass(frozen=True, eq=False)
class NonSinSpectrum:
    """``f0 + sum A_n (g_n - g0) + sum B_n h_n``."""

    f0: float
    A: np.ndarray
    B: np.ndarray
    basis: GeneratorBasis = field(repr=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float).ravel()
        B = np.array(self.B, dtype=float).ravel()
        if (len(A) == 0) != (self.basis.even is None):
            raise ValueError("A is empty exactly when the basis has no even generator")
        if (len(B) == 0) != (self.basis.odd is None):
            raise ValueError("B is empty exactly when the basis has no odd generator")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise ValueError("coefficients must be finite")
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "f0", float(self.f0))

    @property
    def N(self) -> int:
        return max(len(self.A), len(self.B))

    @property
    def L(self) -> float:
        return self.basis.L


def _scale(s: SinSpectrum) -> float:
    return max(1.0, float(np.max(np.abs(np.concatenate([s.a, s.b, [s.f0]])))))


def expand_even(f_even: SinSpectrum, basis: GeneratorBasis, N: int) -> NonSinSpectrum:
    """Coefficients ``A_n`` of an even function over the even generator's harmonics."""
    if basis.even is None:
        raise MissingGeneratorError("even")
    _check_parity(f_even, "even", "target")
    A = dirichlet_solve(f_even.a, basis.c, N)
    return NonSinSpectrum(f_even.f0, A, np.zeros(N) if basis.odd is not None else [], basis)


def expand_odd(f_odd: SinSpectrum, basis: GeneratorBasis, N: int) -> NonSinSpectrum:
    """Coefficients ``B_n`` of an odd function over the odd generator's harmonics."""
    if basis.odd is None:
        raise MissingGeneratorError("odd")
    _check_parity(f_odd, "odd", "target")
    B = dirichlet_solve(f_odd.b, basis.d, N)
    return NonSinSpectrum(0.0, np.zeros(N) if basis.even is not None else [], B, basis)


def expand_spectrum(s: SinSpectrum, basis: GeneratorBasis, N: int) -> NonSinSpectrum:
    """Expand a general spectrum: its cosine part over the even generator, sine part over the odd one."""
    scale = _scale(s)
    a, b = s.a[:N], s.b[:N]
    if basis.even is not None:
        A = dirichlet_solve(a, basis.c, N)
    elif np.max(np.abs(a)) > PARITY_TOL * scale:
        raise MissingGeneratorError("even")
    else:
        A = []
    if basis.odd is not None:
        B = dirichlet_solve(b, basis.d, N)
    elif np.max(np.abs(b)) > PARITY_TOL * scale:
        raise MissingGeneratorError("odd")
    else:
        B = []
    return NonSinSpectrum(s.f0, A, B, basis)


def expand_general(f: PiecewiseFunction, basis: GeneratorBasis, N: int) -> NonSinSpectrum:
    """Split ``f`` into mean, even and odd parts and expand each over its generator."""
    f0, even, odd = f.parity_split()
    se = compute_spectrum(even, N)
    so = compute_spectrum(odd, N)
    merged = SinSpectrum(f.L, f0, se.a, so.b)
    return expand_spectrum(merged, basis, N)


def combine_general(s: NonSinSpectrum):
    """Coefficients over ``g_n(x) - g0`` and ``g_n(-x) - g0`` for a mixed generator.

    Returns ``(P, Q)`` with ``P = (A+B)/2`` and ``Q = (A-B)/2``.
    """
    if len(s.A) == 0 or len(s.B) == 0:
        raise ValueError("need both A and B coefficients")
    return 0.5 * (s.A + s.B), 0.5 * (s.A - s.B)


def reconstruct_sin(s: NonSinSpectrum) -> SinSpectrum:
    """Sinusoidal spectrum implied by the expansion, for ``m <= N``."""
    N = s.N
    a = dirichlet_multiply(s.A, s.basis.c, N) if len(s.A) else np.zeros(N)
    b = dirichlet_multiply(s.B, s.basis.d, N) if len(s.B) else np.zeros(N)
    return SinSpectrum(s.L, s.f0, a, b)


def invert_expansion(target: SinSpectrum, f_as_basis: SinSpectrum, N: int, parity: str) -> np.ndarray:
    """Coefficients of ``target`` over the harmonics of ``f_as_basis`` (roles swapped).

    ``parity`` selects the cosine (``even``) or sine (``odd``) coefficients.
    """
    if parity == "even":
        return dirichlet_solve(target.a, f_as_basis.a, N)
    if parity == "odd":
        return dirichlet_solve(target.b, f_as_basis.b, N)
    raise ValueError("parity must be 'even' or 'odd'")
