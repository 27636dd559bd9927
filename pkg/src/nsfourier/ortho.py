"""Gram-Schmidt orthogonalisation of dilated-harmonic families and projection onto them.

For the even family the elements are ``g_n - g0``, for the odd family ``h_n``.
The orthogonal family is ``Phi_n = sum_i mix[n, i] * (g_i - g0)`` with ``mix``
unit lower triangular, so ``mix[n, i] = -C_in`` for ``i < n``.

Two harmonic models are offered:

* ``exact``: the dilated generators themselves; inner products by quadrature,
  cross-checked against the spectral identity with a Parseval tail bound.
* ``series``: each harmonic band-limited to total frequency ``<= N`` (its
  truncated cosine/sine series); inner products from the spectra. In this
  model projection followed by :func:`to_nonorthogonal` coincides with the
  triangular solve of :mod:`nsfourier.convert`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .convert import GeneratorBasis, NonSinSpectrum
from .errors import NormCollapseError, NumericError, PreconditionError
from .piecewise import PiecewiseFunction, dilation_breakpoints
from .spectrum import SinSpectrum, compute_spectrum

EXACT = "exact"
SERIES = "series"
COLLAPSE_RTOL = 1e-10
CROSSCHECK_ATOL = 1e-6


def spread(coeffs, n: int, K: int) -> np.ndarray:
    """Sinusoidal coefficients of the order-``n`` harmonic: ``c_{m/n}`` if ``n | m`` else 0."""
    out = np.zeros(K)
    k = np.arange(1, K // n + 1)
    out[n * k - 1] = np.asarray(coeffs)[k - 1]
    return out


def _coeffs(basis: GeneratorBasis, parity: str) -> np.ndarray:
    return basis.c if parity == "even" else basis.d


def _generator(basis: GeneratorBasis, parity: str):
    gen = basis.even if parity == "even" else basis.odd
    if gen is None:
        from .errors import MissingGeneratorError

        raise MissingGeneratorError(parity)
    return gen


def _harmonic_values(fn: PiecewiseFunction, g0: float, orders, x):
    """Columns ``g(n x) - g0`` for ``n`` in ``orders`` (points never on a breakpoint)."""
    return np.stack([fn.eval_segments(n * x) - g0 for n in orders], axis=1)


def quadrature_gram(fn: PiecewiseFunction, g0: float, N: int, interval) -> np.ndarray:
    """``<g_i - g0, g_j - g0>`` on ``interval`` by quadrature, ``i, j <= N``."""
    a, b = interval
    G = np.zeros((N, N))
    for i in range(1, N + 1):
        orders = list(range(1, i + 1))
        bp = dilation_breakpoints(fn, orders, a, b)

        def integrand(x, i=i, orders=orders):
            H = _harmonic_values(fn, g0, orders, x)
            return H * H[:, i - 1:i]

        vals, _ = quadrature.integrate(integrand, bp)
        G[i - 1, :i] = vals
        G[:i, i - 1] = vals
    return G


def spectral_gram(coeffs, N: int, K: int, L: float) -> np.ndarray:
    """``L * sum_{m <= K} c^(i)_m c^(j)_m`` with ``c^(i)`` from :func:`spread`."""
    S = np.stack([spread(coeffs, n, K) for n in range(1, N + 1)])
    return L * (S @ S.T)


def _gram_schmidt_from_gram(G: np.ndarray):
    """Unit lower-triangular ``mix`` and norms with ``mix G mix^T = diag(norms)``."""
    N = G.shape[0]
    mix = np.eye(N)
    norms = np.zeros(N)
    for n in range(N):
        for j in range(n):
            # <g_n, Phi_j> = sum_i mix[j, i] G[n, i]
            proj = float(mix[j, : j + 1] @ G[n, : j + 1]) / norms[j]
            mix[n, : j + 1] -= proj * mix[j, : j + 1]
        norms[n] = float(mix[n, : n + 1] @ G[: n + 1, : n + 1] @ mix[n, : n + 1])
        if not norms[n] > COLLAPSE_RTOL * G[n, n]:
            raise NormCollapseError(
                f"harmonic {n + 1} is linearly dependent on lower orders at this truncation", n + 1
            )
    return mix, norms


@dataclass(frozen=True, eq=False)
class OrthoBasis:
    parity: str
    mix: np.ndarray
    norms_sq: np.ndarray
    basis: GeneratorBasis = field(repr=False)
    interval: tuple[float, float]
    mode: str
    gram: np.ndarray = field(repr=False)
    crosscheck: float | None = None  # largest |quadrature - spectral| seen, when checked

    @property
    def N(self) -> int:
        return len(self.norms_sq)

    @property
    def L(self) -> float:
        return self.basis.L

    @property
    def C(self) -> np.ndarray:
        """Coefficients ``C_in`` of ``Phi_n = g_n - sum_i C_in g_i`` as ``C[n-1, i-1]``."""
        return np.tril(-self.mix, -1)

    def spectrum_of(self, n: int, K: int | None = None) -> np.ndarray:
        """Sinusoidal coefficients of ``Phi_n`` up to frequency ``K``."""
        K = K or self.N
        coeffs = _coeffs(self.basis, self.parity)
        K = min(K, len(coeffs))
        return sum(self.mix[n - 1, i - 1] * spread(coeffs, i, K) for i in range(1, n + 1))

    def evaluate(self, n: int, x):
        """``Phi_n(x)`` in this basis's harmonic model."""
        x = np.asarray(x, dtype=float)
        coeffs = _coeffs(self.basis, self.parity)
        if self.mode == SERIES:
            K = self.N
            s = self.spectrum_of(n, K)
            w = np.arange(1, K + 1) * np.pi / self.L
            trig = np.cos if self.parity == "even" else np.sin
            return trig(np.multiply.outer(x, w)) @ s
        gen = _generator(self.basis, self.parity)
        g0 = gen.g0 if self.parity == "even" else 0.0
        out = np.zeros_like(x)
        for i in range(1, n + 1):
            out = out + self.mix[n - 1, i - 1] * (gen.function(i * x) - g0)
        return out


def gram_schmidt(basis: GeneratorBasis, parity: str, N: int, interval=None, *,
                 mode: str = EXACT, crosscheck: bool = True) -> OrthoBasis:
    """Orthogonalise the first ``N`` harmonics of one parity."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    gen = _generator(basis, parity)
    L = basis.L
    interval = (-L, L) if interval is None else (float(interval[0]), float(interval[1]))
    full_period = math.isclose(interval[0], -L) and math.isclose(interval[1], L)
    coeffs = _coeffs(basis, parity)
    g0 = gen.g0 if parity == "even" else 0.0

    if mode == SERIES:
        if not full_period:
            raise PreconditionError("the series model is only defined on the full period")
        if len(coeffs) < N:
            raise ValueError(f"generator spectrum has {len(coeffs)} terms, need {N}")
        G = spectral_gram(coeffs, N, N, L)
        checked = None
        if crosscheck and gen.function is not None:
            # band-limited harmonics: quadrature of their series must match exactly
            checked = _series_crosscheck(G, coeffs, N, L, parity)
    elif mode == EXACT:
        if gen.function is None:
            raise PreconditionError("exact harmonics need the generator function, not just its spectrum")
        G = quadrature_gram(gen.function, g0, N, interval)
        checked = None
        if crosscheck and full_period:
            checked = _exact_crosscheck(G, coeffs, N, L)
    else:
        raise ValueError(f"mode must be {EXACT!r} or {SERIES!r}")

    mix, norms = _gram_schmidt_from_gram(G)
    return OrthoBasis(parity, mix, norms, basis, interval, mode, G, checked)


def _exact_crosscheck(G, coeffs, N, L):
    K = len(coeffs)
    S = spectral_gram(coeffs, N, K, L)
    # Cauchy-Schwarz on the unresolved frequencies bounds the spectral error
    captured = np.diag(S) / L
    tail = np.clip(np.diag(G) / L - captured, 0.0, None)
    bound = CROSSCHECK_ATOL + L * np.sqrt(np.outer(tail, tail))
    dev = np.abs(G - S)
    if np.any(dev > bound):
        i, j = np.unravel_index(np.argmax(dev - bound), dev.shape)
        raise NumericError(
            f"inner product <g_{i + 1}, g_{j + 1}> disagrees between quadrature and spectrum "
            f"({G[i, j]:.12g} vs {S[i, j]:.12g})"
        )
    return float(np.max(dev))


def _series_crosscheck(G, coeffs, N, L, parity):
    w = np.arange(1, N + 1) * np.pi / L
    trig = np.cos if parity == "even" else np.sin
    S = np.stack([spread(coeffs, n, N) for n in range(1, N + 1)])

    def integrand(x):
        H = trig(np.multiply.outer(x, w)) @ S.T
        return np.einsum("pi,pj->pij", H, H).reshape(len(x), -1)

    vals, _ = quadrature.integrate(integrand, [-L, L], max_width=L / N)
    Q = vals.reshape(N, N)
    dev = np.abs(Q - G)
    if np.any(dev > CROSSCHECK_ATOL):
        raise NumericError(f"series inner products disagree with quadrature by {float(np.max(dev)):.3g}")
    return float(np.max(dev))


@dataclass(frozen=True, eq=False)
class OrthoSpectrum:
    """``A0 + sum A0_n Phi_n + sum B0_n Psi_n``."""

    mean: float
    A0: np.ndarray
    B0: np.ndarray
    even: OrthoBasis | None = field(default=None, repr=False)
    odd: OrthoBasis | None = field(default=None, repr=False)


def _check_pair(even, odd):
    if even is None and odd is None:
        raise ValueError("need at least one orthogonal family")
    if even is not None and odd is not None:
        if even.interval != odd.interval or not math.isclose(even.L, odd.L):
            raise PreconditionError("even and odd families use different intervals")
        if even.mode != odd.mode:
            raise PreconditionError("even and odd families use different harmonic models")


def _inner_with_harmonics(f: PiecewiseFunction, ob: OrthoBasis, part: PiecewiseFunction) -> np.ndarray:
    """``<part, g_i - g0>`` for ``i <= N`` (exact model)."""
    gen = _generator(ob.basis, ob.parity)
    g0 = gen.g0 if ob.parity == "even" else 0.0
    a, b = ob.interval
    orders = list(range(1, ob.N + 1))
    bp = np.union1d(dilation_breakpoints(gen.function, orders, a, b),
                    dilation_breakpoints(part, [1], a, b))

    def integrand(x):
        return part.eval_segments(x)[:, None] * _harmonic_values(gen.function, g0, orders, x)

    vals, _ = quadrature.integrate(integrand, bp, max_width=(b - a) / (2 * ob.N))
    return vals


def project(f: PiecewiseFunction, even: OrthoBasis | None, odd: OrthoBasis | None = None) -> OrthoSpectrum:
    """Euler-type coefficients ``<f, Phi_n>/||Phi_n||^2`` and ``<f, Psi_n>/||Psi_n||^2``.

    On the full period only the even part of ``f`` meets ``Phi_n`` and only the
    odd part meets ``Psi_n``, so each family sees just its own component.
    """
    _check_pair(even, odd)
    ref = even or odd
    a, b = ref.interval
    if not math.isclose(f.L, ref.L, rel_tol=1e-12):
        raise PreconditionError("function and basis have different half-periods")
    full_period = math.isclose(a, -f.L) and math.isclose(b, f.L)
    mean = quadrature.integrate(f.eval_segments, dilation_breakpoints(f, [1], a, b))[0] / (b - a)

    if ref.mode == SERIES:
        s = compute_spectrum(f, ref.N)
    else:
        if full_period:
            _, fe, fo = f.parity_split()
        else:
            fe = fo = f

    def coeffs_for(ob: OrthoBasis | None):
        if ob is None:
            return np.zeros(0)
        if ob.mode == SERIES:
            K = ob.N
            fc = s.a if ob.parity == "even" else s.b
            S = np.stack([spread(_coeffs(ob.basis, ob.parity), n, K) for n in range(1, ob.N + 1)])
            raw = ob.L * (S @ fc[:K])
        else:
            raw = _inner_with_harmonics(f, ob, fe if ob.parity == "even" else fo)
        return (ob.mix @ raw) / ob.norms_sq

    return OrthoSpectrum(mean, coeffs_for(even), coeffs_for(odd), even, odd)


def to_nonorthogonal(s: OrthoSpectrum, basis: GeneratorBasis | None = None) -> NonSinSpectrum:
    """Rewrite ``sum A0_i Phi_i`` as ``sum A_n (g_n - g0)``: ``A = mix^T A0``."""
    ref = s.even or s.odd
    basis = basis or ref.basis
    A = s.even.mix.T @ s.A0 if s.even is not None else np.zeros(0)
    B = s.odd.mix.T @ s.B0 if s.odd is not None else np.zeros(0)
    if basis.even is not None and len(A) == 0:
        A = np.zeros(len(B))
    if basis.odd is not None and len(B) == 0:
        B = np.zeros(len(A))
    return NonSinSpectrum(s.mean, A, B, basis)


def parseval_sum(s: OrthoSpectrum) -> np.ndarray:
    """Running ``A0^2 + (1/2L) sum_{k<=n} (A0_k^2 ||Phi_k||^2 + B0_k^2 ||Psi_k||^2)``.

    On the full period this approaches the mean square of ``f`` from below.
    """
    ref = s.even or s.odd
    N = max(len(s.A0), len(s.B0))
    terms = np.zeros(N)
    if s.even is not None:
        terms[: len(s.A0)] += s.A0**2 * s.even.norms_sq
    if s.odd is not None:
        terms[: len(s.B0)] += s.B0**2 * s.odd.norms_sq
    a, b = ref.interval
    return s.mean**2 + np.cumsum(terms) / (b - a)
