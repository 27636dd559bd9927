"""Partial sums of non-sinusoidal expansions, error metrics and basis comparisons."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .convert import NonSinSpectrum, expand_spectrum
from .errors import PreconditionError
from .ortho import OrthoSpectrum, parseval_sum
from .piecewise import PiecewiseFunction, dilation_breakpoints
from .spectrum import compute_spectrum

EXACT = "exact"
SERIES = "series"
DEFAULT_GRID = 4096


def offset_grid(L: float, points: int = DEFAULT_GRID) -> np.ndarray:
    """Uniform grid on ``[-L, L]`` shifted by half a step."""
    if points < 1:
        raise ValueError("grid needs at least one point")
    h = 2.0 * L / points
    return -L + (np.arange(points) + 0.5) * h


def _band_limited(A, c, N: int, band: int) -> np.ndarray:
    """Total-frequency coefficients of ``sum_{n<=N} A_n gbar_n``, each harmonic cut at ``band``."""
    out = np.zeros(band)
    for n in range(1, min(N, len(A)) + 1):
        if A[n - 1] == 0.0:
            continue
        k = np.arange(1, min(band // n, len(c)) + 1)
        out[n * k - 1] += A[n - 1] * c[k - 1]
    return out


def eval_partial_sum(s: NonSinSpectrum, N: int, x, *, mode: str = EXACT, band: int | None = None):
    """``f0 + sum_{n<=N} A_n (g_n(x) - g0) + sum_{n<=N} B_n h_n(x)``.

    ``mode='exact'`` evaluates the dilated generator functions (periodic, with
    midpoint values at jumps); ``mode='series'`` replaces each harmonic by its
    sinusoidal series cut at total frequency ``band`` (default ``N``).
    """
    if N > s.N:
        raise PreconditionError(f"expansion only has {s.N} terms")
    arr = np.asarray(x, dtype=float)
    flat = np.atleast_1d(arr).ravel()
    out = np.full(flat.shape, s.f0)
    basis = s.basis
    if N == 0:
        pass
    elif mode == EXACT:
        for gen, coeffs, g0 in ((basis.even, s.A, basis.g0), (basis.odd, s.B, 0.0)):
            if gen is None or len(coeffs) == 0:
                continue
            if gen.function is None:
                raise PreconditionError("exact harmonics need the generator function")
            for n in range(1, N + 1):
                if coeffs[n - 1] != 0.0:
                    out = out + coeffs[n - 1] * (gen.function(n * flat) - g0)
    elif mode == SERIES:
        band = N if band is None else band
        w = np.arange(1, band + 1) * np.pi / s.L
        wx = np.outer(flat, w)
        if basis.even is not None and len(s.A):
            out = out + np.cos(wx) @ _band_limited(s.A, basis.c, N, band)
        if basis.odd is not None and len(s.B):
            out = out + np.sin(wx) @ _band_limited(s.B, basis.d, N, band)
    else:
        raise ValueError(f"mode must be {EXACT!r} or {SERIES!r}")
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


def _breakpoints(f: PiecewiseFunction, s: NonSinSpectrum, N: int, mode: str):
    bps = [dilation_breakpoints(f, [1])]
    if mode == EXACT and N > 0:
        for gen in (s.basis.even, s.basis.odd):
            if gen is not None and gen.function is not None:
                bps.append(dilation_breakpoints(gen.function, range(1, N + 1), -f.L, f.L))
    return np.unique(np.concatenate(bps))


def l2_error(f: PiecewiseFunction, s: NonSinSpectrum, N: int, *, mode: str = EXACT) -> float:
    """``sqrt(int_{-L}^{L} (f - S_N)^2 dx)`` on the merged smooth pieces."""
    bp = _breakpoints(f, s, N, mode)
    max_width = f.L / max(N, 1) if mode == SERIES else None

    def integrand(x):
        return (f.eval_segments(x) - eval_partial_sum(s, N, x, mode=mode)) ** 2

    val, _ = quadrature.integrate(integrand, bp, max_width=max_width)
    return math.sqrt(max(val, 0.0))


def sup_error(f: PiecewiseFunction, s: NonSinSpectrum, N: int, *, mode: str = EXACT,
              grid: int = DEFAULT_GRID) -> float:
    x = offset_grid(f.L, grid)
    x = x[~np.isin(x, _breakpoints(f, s, N, mode))]
    return float(np.max(np.abs(f(x) - eval_partial_sum(s, N, x, mode=mode))))


@dataclass(frozen=True)
class ApproximationReport:
    target: str
    basis: str
    N_values: tuple[int, ...]
    l2_error: tuple[float, ...]
    sup_error: tuple[float, ...]
    parseval_residual: tuple[float | None, ...]
    grid: int
    mode: str = EXACT

    def rows(self):
        for n, l2, sup, pr in zip(self.N_values, self.l2_error, self.sup_error, self.parseval_residual):
            yield (self.basis, n, l2, sup, pr)


def error_report(f: PiecewiseFunction, s: NonSinSpectrum, N_list, *, grid: int = DEFAULT_GRID,
                 mode: str = EXACT, ortho: OrthoSpectrum | None = None,
                 target: str = "", basis: str = "") -> ApproximationReport:
    """L2 and sup errors of the partial sums ``S_N`` for each ``N`` in ``N_list``.

    When ``ortho`` is given, also the Parseval residual
    ``mean(f^2) - (A0^2 + (1/2L) sum A0_n^2 ||Phi_n||^2 + ...)`` at each ``N``.
    """
    if grid < 512:
        raise ValueError("error grids use at least 512 points")
    Ns = tuple(int(n) for n in N_list)
    l2 = tuple(l2_error(f, s, n, mode=mode) for n in Ns)
    sup = tuple(sup_error(f, s, n, mode=mode, grid=grid) for n in Ns)
    if ortho is not None:
        ms = f.norm_sq() / f.period
        running = parseval_sum(ortho)
        pr = tuple(float(ms - (running[n - 1] if n > 0 else ortho.mean**2)) for n in Ns)
    else:
        pr = (None,) * len(Ns)
    return ApproximationReport(target or f.to_text(), basis, Ns, l2, sup, pr, grid, mode)


CSV_HEADER = ("basis", "N", "l2_error", "sup_error", "parseval_residual")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def report_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep in reports:
        for row in rep.rows():
            w.writerow([row[0]] + [_fmt(v) for v in row[1:]])
    return buf.getvalue()


def compare_bases(f: PiecewiseFunction, bases, N_list, *, grid: int = DEFAULT_GRID,
                  mode: str = EXACT) -> list[ApproximationReport]:
    """Run :func:`error_report` for every ``(name, GeneratorBasis)`` pair in ``bases``."""
    bases = list(bases)
    if not bases:
        return []
    Nmax = max(N_list)
    spec = compute_spectrum(f, Nmax)
    out = []
    for name, basis in bases:
        s = expand_spectrum(spec, basis, Nmax)
        out.append(error_report(f, s, N_list, grid=grid, mode=mode, basis=name))
    return out


def overshoot(f: PiecewiseFunction, s: NonSinSpectrum, N: int, jump_at: float, *,
              mode: str = EXACT, window: float | None = None, points: int = 20001):
    """Largest excursion of ``S_N`` beyond the one-sided limits next to a jump.

    Returns ``(overshoot, jump_height)``, the overshoot measured above the
    larger limit on the right-hand side of ``jump_at`` or below the smaller one.
    """
    window = window if window is not None else 4.0 * f.L / max(N, 1)
    idx = int(np.argmin(np.abs(np.asarray(f.boundaries) - f.reduce(jump_at))))
    left, right = f.left_limit(idx), f.right_limit(idx)
    height = abs(right - left)
    t = np.linspace(0.0, window, points)[1:]
    xr = jump_at + t
    xl = jump_at - t
    hi, lo = max(left, right), min(left, right)
    sr = eval_partial_sum(s, N, xr, mode=mode)
    sl = eval_partial_sum(s, N, xl, mode=mode)
    both = np.concatenate([sr, sl])
    excess = max(float(np.max(both)) - hi, lo - float(np.min(both)), 0.0)
    return excess, height


def svg_plot(x, curves, *, title: str = "") -> str:
    """Polyline plot in a fixed 800x500 viewbox; ``curves`` is a list of ``(label, y)``."""
    W, H, pad = 800, 500, 40
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(y, dtype=float) for _, y in curves]
    ymin = min(float(np.min(y)) for y in ys) if ys else -1.0
    ymax = max(float(np.max(y)) for y in ys) if ys else 1.0
    if ymax == ymin:
        ymax, ymin = ymax + 1.0, ymin - 1.0
    xmin, xmax = float(x[0]), float(x[-1])

    def px(v):
        return pad + (v - xmin) / (xmax - xmin) * (W - 2 * pad)

    def py(v):
        return H - pad - (v - ymin) / (ymax - ymin) * (H - 2 * pad)

    palette = ("#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
        f'<line x1="{pad}" y1="{py(0.0) if ymin <= 0 <= ymax else H - pad:.2f}" '
        f'x2="{W - pad}" y2="{py(0.0) if ymin <= 0 <= ymax else H - pad:.2f}" stroke="#999999"/>',
    ]
    if title:
        lines.append(f'<text x="{pad}" y="24" font-size="14">{_escape(title)}</text>')
    for k, ((label, _), y) in enumerate(zip(curves, ys)):
        color = palette[k % len(palette)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        lines.append(f'<text x="{W - pad - 160}" y="{pad + 16 * (k + 1)}" font-size="12" '
                     f'fill="{color}">{_escape(label)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
