"""2L-periodic piecewise functions.

A :class:`PiecewiseFunction` lives on ``[-L, L]`` and is extended periodically.
Segment membership is half-open ``[x_i, x_{i+1})``; exactly at a stored boundary
the value is the pinned one if present, otherwise the mean of the two one-sided
limits (the Fourier-function convention).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import quadrature
from .expr import Const, Expr, PiecewiseSpec, X, add, mul, neg, parse_piecewise, sub, as_expr

# relative tolerance for merging breakpoints produced by dilation/translation
_CONSTRUCTION_RTOL = 1e-13


@dataclass(frozen=True, eq=False)
class PiecewiseFunction:
    boundaries: tuple[float, ...]
    exprs: tuple[Expr, ...]
    pins: tuple[float | None, ...] = ()

    def __post_init__(self):
        spec = PiecewiseSpec(self.boundaries, self.exprs, self.pins)
        object.__setattr__(self, "boundaries", spec.boundaries)
        object.__setattr__(self, "exprs", spec.exprs)
        object.__setattr__(self, "pins", spec.pins)
        if not math.isclose(spec.boundaries[0], -spec.boundaries[-1], rel_tol=1e-12, abs_tol=1e-300):
            raise ValueError("domain must be symmetric [-L, L]; use from_spec to recenter")
        object.__setattr__(self, "_bnd", np.array(spec.boundaries))

    # -- construction -------------------------------------------------------

    @classmethod
    def from_spec(cls, spec: PiecewiseSpec) -> PiecewiseFunction:
        """Recenter ``spec`` from ``[x1, x_{m+1}]`` onto ``[-L, L]``."""
        lo, hi = spec.boundaries[0], spec.boundaries[-1]
        c = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        if c == 0.0:
            bnd = list(spec.boundaries)
            exprs = spec.exprs
        else:
            bnd = [b - c for b in spec.boundaries]
            exprs = tuple(e.subs(add(X, Const(c))) for e in spec.exprs)
        bnd[0], bnd[-1] = -half, half
        return cls(tuple(bnd), tuple(exprs), spec.pins)

    @classmethod
    def parse(cls, text: str) -> PiecewiseFunction:
        return cls.from_spec(parse_piecewise(text))

    @classmethod
    def from_expr(cls, e: Expr | str, L: float) -> PiecewiseFunction:
        if isinstance(e, str):
            from .expr import parse_expr

            e = parse_expr(e)
        return cls((-L, L), (e,))

    @classmethod
    def constant(cls, value: float, L: float) -> PiecewiseFunction:
        return cls((-L, L), (Const(float(value)),))

    # -- basic properties ---------------------------------------------------

    @property
    def L(self) -> float:
        return self.boundaries[-1]

    @property
    def period(self) -> float:
        return 2.0 * self.L

    @property
    def m(self) -> int:
        return len(self.exprs)

    @property
    def spec(self) -> PiecewiseSpec:
        return PiecewiseSpec(self.boundaries, self.exprs, self.pins)

    def to_text(self) -> str:
        return self.spec.to_text()

    def __repr__(self):
        return f"PiecewiseFunction({self.to_text()!r})"

    # -- evaluation ---------------------------------------------------------

    def reduce(self, x):
        """Map ``x`` into ``[-L, L)`` by whole periods."""
        L = self.L
        x = np.asarray(x, dtype=float)
        return x - 2.0 * L * np.floor((x + L) / (2.0 * L))

    def left_limit(self, i: int) -> float:
        """Limit from the left at boundary ``i`` (periodic wrap at ``i == 0``)."""
        if i == 0:
            return float(self.exprs[-1](self.boundaries[-1]))
        return float(self.exprs[i - 1](self.boundaries[i]))

    def right_limit(self, i: int) -> float:
        if i == self.m:
            return float(self.exprs[0](self.boundaries[0]))
        return float(self.exprs[i](self.boundaries[i]))

    def boundary_value(self, i: int) -> float:
        pin = self.pins[i]
        if pin is None and i in (0, self.m):
            pin = self.pins[0] if self.pins[0] is not None else self.pins[self.m]
        if pin is not None:
            return float(pin)
        return 0.5 * (self.left_limit(i) + self.right_limit(i))

    def __call__(self, x):
        """Periodic evaluation (``eval_periodic``)."""
        arr = np.asarray(x, dtype=float)
        y = np.atleast_1d(self.reduce(arr))
        idx = np.clip(np.searchsorted(self._bnd, y, side="right") - 1, 0, self.m - 1)
        out = np.empty_like(y)
        for i, e in enumerate(self.exprs):
            mask = idx == i
            if np.any(mask):
                out[mask] = e(y[mask])
        hits = np.isin(y, self._bnd)
        if np.any(hits):
            for j in np.flatnonzero(hits):
                i = int(np.searchsorted(self._bnd, y[j]))
                out[j] = self.boundary_value(i)
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def eval_segments(self, x):
        """Evaluate at points known to lie strictly inside segments (no boundary logic)."""
        y = self.reduce(x)
        idx = np.clip(np.searchsorted(self._bnd, y, side="right") - 1, 0, self.m - 1)
        out = np.empty_like(y)
        for i, e in enumerate(self.exprs):
            mask = idx == i
            if np.any(mask):
                out[mask] = e(y[mask])
        return out

    # -- integrals ----------------------------------------------------------

    def integral(self, weight: Callable | None = None, *, max_width=None, breakpoints=None, **kw):
        """``int_{-L}^{L} f(x) w(x) dx`` with ``w`` vectorised (may return 2-d)."""
        bp = self._bnd if breakpoints is None else np.asarray(breakpoints)
        if weight is None:
            return quadrature.integrate(self.eval_segments, bp, max_width=max_width, **kw)[0]

        def integrand(x):
            fx = self.eval_segments(x)
            w = weight(x)
            return fx[:, None] * w if np.ndim(w) == 2 else fx * w

        return quadrature.integrate(integrand, bp, max_width=max_width, **kw)[0]

    def mean(self) -> float:
        return self.integral() / self.period

    def norm_sq(self) -> float:
        return quadrature.integrate(lambda x: self.eval_segments(x) ** 2, self._bnd)[0]

    # -- transformations ----------------------------------------------------

    def compose_affine(self, scale: float, shift: float = 0.0) -> PiecewiseFunction:
        """``x -> f_periodic(scale*x + shift)`` materialised on ``[-L, L]``."""
        if scale == 0:
            raise ValueError("scale must be nonzero")
        L = self.L
        T = 2.0 * L
        lo, hi = sorted((-scale * L + shift, scale * L + shift))
        pts = []
        for b in self.boundaries[:-1]:
            k0 = math.floor((lo - b) / T) - 1
            k1 = math.ceil((hi - b) / T) + 1
            for k in range(k0, k1 + 1):
                pts.append((b + k * T - shift) / scale)
        eps = _CONSTRUCTION_RTOL * L
        inner = sorted(p for p in pts if -L + eps < p < L - eps)
        merged = []
        for p in inner:
            if not merged or p - merged[-1] > eps:
                merged.append(p)
        bnd = [-L] + merged + [L]

        exprs = []
        for p, q in zip(bnd[:-1], bnd[1:]):
            y = scale * 0.5 * (p + q) + shift
            yr = float(self.reduce(y))
            offset = y - yr  # whole number of periods
            i = min(int(np.searchsorted(self._bnd, yr, side="right")) - 1, self.m - 1)
            inner_arg = add(mul(Const(float(scale)), X), Const(float(shift - offset)))
            exprs.append(self.exprs[i].subs(inner_arg))

        pins = [None] * len(bnd)
        if any(v is not None for v in self.pins):
            for j, xb in enumerate(bnd):
                yr = float(self.reduce(scale * xb + shift))
                near = np.flatnonzero(np.abs(self._bnd - yr) <= eps)
                if near.size:
                    i = int(near[0])
                    pin = self.pins[i]
                    if pin is None and i in (0, self.m):
                        pin = self.pins[0] if self.pins[0] is not None else self.pins[self.m]
                    pins[j] = pin
        return PiecewiseFunction(tuple(bnd), tuple(exprs), tuple(pins))

    def harmonic(self, n: int) -> PiecewiseFunction:
        """The order-``n`` dilation ``x -> f(n x)`` (2L/n-periodic), materialised on ``[-L, L]``.

        A copy that straddles ``+-L`` is stored as two pieces.
        """
        if int(n) != n or n < 1:
            raise ValueError("harmonic order must be a positive integer")
        if n == 1:
            return self
        return self.compose_affine(float(n))

    def reflect(self) -> PiecewiseFunction:
        """``x -> f(-x)``."""
        return self.compose_affine(-1.0)

    def shift(self, t: float) -> PiecewiseFunction:
        """``x -> f(x + t)``."""
        return self.compose_affine(1.0, float(t))

    def rescale(self, L_new: float) -> PiecewiseFunction:
        """Same shape on ``[-L_new, L_new]``: ``x -> f(x * L / L_new)``."""
        s = self.L / L_new
        bnd = [b / s for b in self.boundaries]
        bnd[0], bnd[-1] = -L_new, L_new
        return PiecewiseFunction(tuple(bnd), tuple(e.subs(mul(Const(s), X)) for e in self.exprs), self.pins)

    def refine(self, breakpoints) -> PiecewiseFunction:
        """Re-express on a superset of the current boundaries (values unchanged)."""
        bnd = sorted(set(float(b) for b in breakpoints) | set(self.boundaries))
        exprs, pins = [], []
        for p, q in zip(bnd[:-1], bnd[1:]):
            i = min(int(np.searchsorted(self._bnd, 0.5 * (p + q), side="right")) - 1, self.m - 1)
            exprs.append(self.exprs[i])
        lookup = dict(zip(self.boundaries, self.pins))
        pins = [lookup.get(b) for b in bnd]
        return PiecewiseFunction(tuple(bnd), tuple(exprs), tuple(pins))

    def combine(self, other: PiecewiseFunction, op: Callable[[Expr, Expr], Expr]) -> PiecewiseFunction:
        """Pointwise ``op(self, other)`` on the union of both breakpoint sets."""
        if not math.isclose(self.L, other.L, rel_tol=1e-12):
            raise ValueError("half-periods differ")
        bnd = sorted(set(self.boundaries) | set(other.boundaries[1:-1]))
        a = self.refine(bnd)
        b = other.refine(bnd)
        exprs = tuple(op(ea, eb) for ea, eb in zip(a.exprs, b.exprs))
        pins = []
        for i, x in enumerate(bnd):
            if a.pins[i] is None and b.pins[i] is None:
                pins.append(None)
            else:
                pins.append(float(op(Const(a(x)), Const(b(x)))(0.0)))
        return PiecewiseFunction(tuple(bnd), exprs, tuple(pins))

    def __add__(self, other):
        if isinstance(other, PiecewiseFunction):
            return self.combine(other, add)
        return self.map(lambda e: add(e, as_expr(other)))

    def __sub__(self, other):
        if isinstance(other, PiecewiseFunction):
            return self.combine(other, sub)
        return self.map(lambda e: sub(e, as_expr(other)))

    def __mul__(self, c):
        return self.map(lambda e: mul(as_expr(c), e))

    __rmul__ = __mul__

    def __neg__(self):
        return self.map(neg)

    def map(self, fn: Callable[[Expr], Expr]) -> PiecewiseFunction:
        pins = tuple(None if v is None else float(fn(Const(v))(0.0)) for v in self.pins)
        return PiecewiseFunction(self.boundaries, tuple(fn(e) for e in self.exprs), pins)

    def derivative(self) -> PiecewiseFunction:
        """Segment-wise derivative; pins are dropped."""
        return PiecewiseFunction(self.boundaries, tuple(e.diff() for e in self.exprs))

    def jumps(self):
        """``(x_i, f(x_i+) - f(x_i-))`` at every boundary, ``x_0 = -L`` wrapping to ``L``."""
        return [(self.boundaries[i], self.right_limit(i) - self.left_limit(i)) for i in range(self.m)]

    def parity_split(self):
        """Return ``(f0, even, odd)`` with ``f = f0 + even + odd`` at continuity points."""
        f0 = self.mean()
        r = self.reflect()
        even = self.combine(r, lambda a, b: mul(Const(0.5), add(a, b)))
        even = even - f0
        odd = self.combine(r, lambda a, b: mul(Const(0.5), sub(a, b)))
        return f0, even, odd


def harmonic(f: PiecewiseFunction, n: int) -> PiecewiseFunction:
    return f.harmonic(n)


def eval_periodic(f: PiecewiseFunction, x):
    return f(x)


def parity_split(f: PiecewiseFunction):
    return f.parity_split()


def reflect(f: PiecewiseFunction) -> PiecewiseFunction:
    return f.reflect()


def dilation_breakpoints(f: PiecewiseFunction, orders, lo: float | None = None, hi: float | None = None):
    """Sorted union of the breakpoints of ``x -> f(n x)`` on ``[lo, hi]`` for every ``n`` in ``orders``."""
    L = f.L
    lo = -L if lo is None else lo
    hi = L if hi is None else hi
    T = 2.0 * L
    pts = [np.array([lo, hi])]
    base = np.array(f.boundaries[:-1])
    for n in orders:
        k = np.arange(math.floor(n * lo / T) - 1, math.ceil(n * hi / T) + 2)
        cand = ((base[:, None] + T * k[None, :]) / n).ravel()
        pts.append(cand[(cand > lo) & (cand < hi)])
    return np.unique(np.concatenate(pts))
