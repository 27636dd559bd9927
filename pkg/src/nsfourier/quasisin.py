"""Quasi-sinusoids assembled from a kernel on ``[0, L/2]``.

``S[g]_L`` copies the kernel into the four quarters of ``[-L, L]`` with the
symmetries of a sine (odd, each half mirror-symmetric about ``+-L/2``);
``C[g]_L`` does the same with the symmetries of a cosine (even, each half
point-symmetric about ``+-L/2``).

Smoothing adds rectangular-pulse and ramp quasi-sinusoids. Because every
correction is itself built from a kernel, it is applied to the kernel and the
body is rebuilt, so parity is preserved by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParityError, PreconditionError
from .expr import Const, Expr, X, add, mul, neg, parse_expr, parse_piecewise, sub, format_number, to_text
from .piecewise import PiecewiseFunction

SINE = "sine"
COSINE = "cosine"
JUMP_TOL = 1e-12
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Kernel:
    """Piecewise kernel on ``[0, L/2]``."""

    boundaries: tuple[float, ...]
    exprs: tuple[Expr, ...]
    L: float

    def __post_init__(self):
        b = tuple(float(v) for v in self.boundaries)
        if len(self.exprs) != len(b) - 1 or not self.exprs:
            raise ValueError("need exactly one expression per kernel segment")
        if any(q <= p for p, q in zip(b, b[1:])):
            raise ValueError("kernel boundaries must be strictly increasing")
        if b[0] != 0.0 or not math.isclose(b[-1], self.L / 2, rel_tol=1e-12):
            raise PreconditionError(
                f"kernel must be defined on [0, L/2] = [0, {format_number(self.L / 2)}], "
                f"got [{format_number(b[0])}, {format_number(b[-1])}]"
            )
        b = b[:-1] + (self.L / 2,)
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "exprs", tuple(self.exprs))
        object.__setattr__(self, "L", float(self.L))

    @classmethod
    def parse(cls, text: str, L: float | None = None) -> Kernel:
        """Accept either a bare formula (``L`` required) or a piecewise spec on ``[0, L/2]``."""
        if text.lstrip().startswith("P"):
            spec = parse_piecewise(text)
            if L is None:
                L = 2.0 * spec.boundaries[-1]
            return cls(spec.boundaries, spec.exprs, L)
        if L is None:
            raise PreconditionError("a bare kernel formula needs the half-period L")
        return cls((0.0, L / 2), (parse_expr(text),), L)

    @classmethod
    def from_expr(cls, e: Expr | str, L: float) -> Kernel:
        if isinstance(e, str):
            e = parse_expr(e)
        return cls((0.0, L / 2), (e,), L)

    def to_text(self) -> str:
        parts = [format_number(self.boundaries[0])]
        for e, b in zip(self.exprs, self.boundaries[1:]):
            parts += [to_text(e), format_number(b)]
        return "P[" + " | ".join(parts) + "]"

    def value(self, x: float, side: str = "right") -> float:
        """Kernel value at ``x``; ``side`` picks the segment at a boundary."""
        return float(self.exprs[self._segment(x, side)](x))

    def slope(self, x: float, side: str = "right") -> float:
        return float(self.exprs[self._segment(x, side)].diff()(x))

    def _segment(self, x: float, side: str) -> int:
        b = np.asarray(self.boundaries)
        i = int(np.searchsorted(b, x, side="right" if side == "right" else "left")) - 1
        return min(max(i, 0), len(self.exprs) - 1)

    def map(self, fn) -> Kernel:
        return Kernel(self.boundaries, tuple(fn(e) for e in self.exprs), self.L)

    def add_from(self, p: float, term: Expr) -> Kernel:
        """Add ``term`` on every segment right of ``p`` (``p`` must be a boundary)."""
        exprs = tuple(add(e, term) if lo >= p else e for e, lo in zip(self.exprs, self.boundaries))
        return Kernel(self.boundaries, exprs, self.L)

    def is_zero(self, samples: int = 257) -> bool:
        for e, p, q in zip(self.exprs, self.boundaries, self.boundaries[1:]):
            x = np.linspace(p, q, samples)
            if np.any(np.abs(e(x)) > JUMP_TOL * max(1.0, self.L)):
                return False
        return True


@dataclass(frozen=True)
class Correction:
    """One smoothing term: a pulse (value jump) or a ramp (slope jump) quasi-sinusoid."""

    kind: str  # 'pulse' or 'ramp'
    location: float  # kernel abscissa where the defect sits
    amount: float  # height of the pulse or slope of the ramp added to the kernel
    note: str = ""


@dataclass(frozen=True, eq=False)
class QuasiSinusoid:
    kind: str
    kernel: Kernel
    body: PiecewiseFunction
    smoothing: tuple[Correction, ...] = ()
    residual: tuple[tuple[float, float, float], ...] = ()

    @property
    def L(self) -> float:
        return self.kernel.L

    def __call__(self, x):
        return self.body(x)

    def symmetry_residuals(self, points: int = 4096) -> tuple[float, float]:
        """``(parity, half-wave)`` residuals on an offset uniform grid of ``[0, L]``."""
        L = self.L
        x = (np.arange(points) + 0.5) * (L / points)
        t = (np.arange(points) + 0.5) * (L / 2 / points)
        f = self.body
        if self.kind == SINE:
            par = np.max(np.abs(f(x) + f(-x)))
            half = np.max(np.abs(f(L / 2 + t) - f(L / 2 - t)))
        else:
            par = np.max(np.abs(f(x) - f(-x)))
            half = np.max(np.abs(f(L / 2 + t) + f(L / 2 - t)))
        return float(par), float(half)


def _assemble(kernel: Kernel, kind: str) -> PiecewiseFunction:
    L = kernel.L
    s = 1.0 if kind == SINE else -1.0
    pieces = []
    for e, p, q in zip(kernel.exprs, kernel.boundaries, kernel.boundaries[1:]):
        # (-L, -L/2): -g(x+L)
        pieces.append((p - L, q - L, neg(e.subs(add(X, Const(L))))))
        # (-L/2, 0): -g(-x) for S, g(-x) for C
        mirrored = e.subs(neg(X))
        pieces.append((-q, -p, neg(mirrored) if s > 0 else mirrored))
        # (0, L/2): g(x)
        pieces.append((p, q, e))
        # (L/2, L): g(L-x) for S, -g(L-x) for C
        back = e.subs(sub(Const(L), X))
        pieces.append((L - q, L - p, back if s > 0 else neg(back)))
    pieces.sort(key=lambda t: t[0])
    # quarter boundaries computed two ways must coincide exactly
    for (p0, q0, _), (p1, _, _) in zip(pieces, pieces[1:]):
        if not math.isclose(q0, p1, rel_tol=0, abs_tol=1e-14 * L):
            raise ValueError("kernel quarters do not tile the period")
    bnd = [-L] + [pc[0] for pc in pieces[1:]] + [L]
    body = PiecewiseFunction(tuple(bnd), tuple(e for _, _, e in pieces))
    mean = body.mean()
    if abs(mean) > 1e-12 * max(1.0, _scale(body)):
        body = body - mean
    return body


def _scale(f: PiecewiseFunction) -> float:
    vals = [abs(f.left_limit(i)) for i in range(1, f.m + 1)] + [abs(f.right_limit(i)) for i in range(f.m)]
    return max(vals)


def make_sine_like(kernel: Kernel) -> QuasiSinusoid:
    """``S[g]_L``: odd, and mirror-symmetric about ``+-L/2``."""
    return QuasiSinusoid(SINE, kernel, _assemble(kernel, SINE))


def make_cosine_like(kernel: Kernel) -> QuasiSinusoid:
    """``C[g]_L``: even, and point-symmetric about ``+-L/2``."""
    return QuasiSinusoid(COSINE, kernel, _assemble(kernel, COSINE))


def make(kernel: Kernel, kind: str) -> QuasiSinusoid:
    if kind == SINE:
        return make_sine_like(kernel)
    if kind == COSINE:
        return make_cosine_like(kernel)
    raise ValueError(f"kind must be {SINE!r} or {COSINE!r}")


def continuity_defects(f: PiecewiseFunction, tol: float = JUMP_TOL):
    """``(x, value jump, slope jump)`` at every boundary where either is nonzero."""
    df = f.derivative()
    scale = max(1.0, _scale(f))
    dscale = max(1.0, _scale(df))
    out = []
    for i in range(f.m):
        vj = f.right_limit(i) - f.left_limit(i)
        sj = df.right_limit(i) - df.left_limit(i)
        if abs(vj) > tol * scale or abs(sj) > tol * dscale * 1e3:
            out.append((f.boundaries[i], vj, sj))
    return out


def smooth(q: QuasiSinusoid) -> QuasiSinusoid:
    """Remove value and slope jumps by adding pulse and ramp quasi-sinusoids.

    Corrections are applied to the kernel in this order: steps at interior
    kernel jumps, hinges at interior kernel kinks, the end pulse, the end ramp.
    Each later term is continuous where the earlier ones acted, so the order
    does not undo previous fixes. A defect whose correction would cancel the
    whole kernel (e.g. the triangle kernel ``x``) is left and reported in
    ``residual``.
    """
    k = q.kernel
    L = k.L
    h = L / 2
    scale = max(1.0, max(abs(k.value(p)) for p in k.boundaries[:-1]))
    corrections: list[Correction] = []

    for p in k.boundaries[1:-1]:
        jump = k.value(p, "right") - k.value(p, "left")
        if abs(jump) > JUMP_TOL * scale:
            k = k.add_from(p, Const(-jump))
            corrections.append(Correction("pulse", p, -jump, "interior kernel jump"))
    for p in k.boundaries[1:-1]:
        kink = k.slope(p, "right") - k.slope(p, "left")
        if abs(kink) > JUMP_TOL * 1e3 * scale:
            k = k.add_from(p, mul(Const(-kink), sub(X, Const(p))))
            corrections.append(Correction("ramp", p, -kink, "interior kernel kink"))

    if q.kind == SINE:
        # odd body is continuous at 0 and +-L only if g(0) = 0,
        # and C^1 at +-L/2 only if g'(L/2) = 0
        alpha = -k.value(0.0)
        chord = -2.0 * (q.kernel.value(h, "left") - q.kernel.value(0.0)) / L
        if abs(alpha) > JUMP_TOL * scale:
            k = k.map(lambda e: add(e, Const(alpha)))
            corrections.append(Correction("pulse", 0.0, alpha, "value jump at the origin"))
        beta = -k.slope(h, "left")
        ramp_term = mul(Const(beta), X)
        ramp_note = f"slope jump at L/2; chord ramp -2[g(L/2)-g(0)]/L = {format_number(chord)}"
    else:
        # even body is continuous at +-L/2 only if g(L/2) = 0,
        # and C^1 at 0 and +-L only if g'(0) = 0
        alpha = -k.value(h, "left")
        if abs(alpha) > JUMP_TOL * scale:
            k = k.map(lambda e: add(e, Const(alpha)))
            corrections.append(Correction("pulse", h, alpha, "value jump at L/2"))
        beta = -k.slope(0.0)
        ramp_term = mul(Const(beta), sub(X, Const(h)))
        ramp_note = "slope jump at the origin"

    if abs(beta) > JUMP_TOL * 1e3 * scale:
        candidate = k.map(lambda e: add(e, ramp_term))
        if candidate.is_zero():
            pass  # the ramp would erase the kernel; keep the defect as a residual
        else:
            k = candidate
            corrections.append(Correction("ramp", h if q.kind == SINE else 0.0, beta, ramp_note))

    if not corrections:
        body = q.body
    else:
        body = _assemble(k, q.kind)
    residual = tuple(continuity_defects(body))
    return QuasiSinusoid(q.kind, k, body, q.smoothing + tuple(corrections), residual)


def shift_quarter(q: QuasiSinusoid) -> QuasiSinusoid:
    """Translate by ``L/2`` (a quarter period): ``x -> q(x + L/2)``.

    ``S[g]`` becomes ``C[g(L/2 - x)]`` and ``C[g]`` becomes ``S[-g(L/2 - x)]``.
    The parity of the result is checked numerically.
    """
    L = q.L
    h = L / 2
    k = q.kernel
    flip = sub(Const(h), X)
    new_b = tuple(sorted(h - b for b in k.boundaries))
    new_b = (0.0,) + new_b[1:-1] + (h,)
    exprs = tuple(reversed([e.subs(flip) for e in k.exprs]))
    if q.kind == SINE:
        kind = COSINE
    else:
        kind = SINE
        exprs = tuple(neg(e) for e in exprs)
    kernel = Kernel(new_b, exprs, L)
    body = q.body.shift(h)
    result = QuasiSinusoid(kind, kernel, body, q.smoothing, q.residual)
    par, half = result.symmetry_residuals(1024)
    scale = max(1.0, _scale(body))
    if par > SYMMETRY_TOL * scale or half > SYMMETRY_TOL * scale:
        raise ParityError(
            f"quarter shift is not {kind}-like (residuals {par:.3g}, {half:.3g})"
        )
    return result


def renormalize(q: QuasiSinusoid, factor: float = 2.0) -> QuasiSinusoid:
    """Compress onto ``[-L/factor, L/factor]`` by the substitution ``x -> factor*x``."""
    L_new = q.L / factor
    kernel = Kernel(tuple(b / factor for b in q.kernel.boundaries),
                    tuple(e.subs(mul(Const(float(factor)), X)) for e in q.kernel.exprs), L_new)
    return QuasiSinusoid(q.kind, kernel, q.body.rescale(L_new), q.smoothing, q.residual)
