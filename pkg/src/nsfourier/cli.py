"""Command-line front end.

Exit codes: 0 success, 1 input/output failure, 2 parse error, 3 numerical
failure, 4 violated precondition (wrong parity, missing generator, ...).
Outputs go to ``-o`` through an atomic rename, or to stdout.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analysis, convert, ortho, quasisin
from .errors import NSFourierError, PreconditionError
from .io import (
    atomic_write,
    basis_from_sources,
    dumps,
    format_float,
    load_generator,
    nonsin_to_dict,
    ortho_spectrum_to_dict,
    ortho_to_dict,
    read_function_text,
    spectrum_to_dict,
)
from .piecewise import PiecewiseFunction
from .spectrum import compute_spectrum

FORMATS = ("json", "csv", "svg")


@dataclass
class JobConfig:
    command: str
    function: str | None = None
    even_basis: str | None = None
    odd_basis: str | None = None
    mixed_basis: str | None = None
    N: int = 64
    format: str = "json"
    output: str | None = None
    grid: int = analysis.DEFAULT_GRID
    harmonics: str = analysis.EXACT
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.N < 1:
            raise PreconditionError("N must be at least 1")
        if self.format not in FORMATS:
            raise PreconditionError(f"unknown output format {self.format!r}")

    def basis(self, N: int | None = None) -> convert.GeneratorBasis:
        if self.even_basis is None and self.odd_basis is None and self.mixed_basis is None:
            raise PreconditionError("give --even-basis, --odd-basis or --mixed-basis")
        return basis_from_sources(N or self.N, self.even_basis, self.odd_basis, self.mixed_basis)

    def target(self) -> PiecewiseFunction:
        if self.function is None:
            raise PreconditionError("give the function with -f/--function")
        text, _ = read_function_text(self.function)
        return PiecewiseFunction.parse(text)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else (str(v) if isinstance(v, (int, str)) else format_float(v))
                              for v in row))
    return "\n".join(lines) + "\n"


def _coeff_rows(*columns):
    n = max(len(c) for c in columns)
    for i in range(n):
        yield (i + 1, *(c[i] if i < len(c) else None for c in columns))


def cmd_coeffs(cfg: JobConfig) -> str:
    s = compute_spectrum(cfg.target(), cfg.N)
    if cfg.format == "csv":
        return _csv(("n", "a", "b"), _coeff_rows(s.a, s.b))
    return dumps(spectrum_to_dict(s))


def cmd_expand(cfg: JobConfig) -> str:
    f = cfg.target()
    basis = cfg.basis()
    _check_period(f, basis.L)
    s = convert.expand_general(f, basis, cfg.N)
    if cfg.format == "csv":
        return _csv(("n", "A", "B"), _coeff_rows(s.A, s.B))
    out = nonsin_to_dict(s)
    if cfg.mixed_basis is not None:
        P, Q = convert.combine_general(s)
        out["mixed"] = {"generator": read_function_text(cfg.mixed_basis)[0], "P": P, "Q": Q}
    return dumps(out)


def cmd_invert(cfg: JobConfig) -> str:
    """Coefficients of the basis generator over the harmonics of ``-f`` (roles swapped)."""
    f = cfg.target()
    fs = compute_spectrum(f, cfg.N)
    out = {"function": f.to_text()}
    for parity, source in (("even", cfg.even_basis), ("odd", cfg.odd_basis)):
        if source is None:
            continue
        g, gs, _ = load_generator(source, cfg.N, parity)
        _check_period(f, g.L)
        out[parity] = {"generator": g.to_text(), "coefficients": convert.invert_expansion(gs, fs, cfg.N, parity)}
    if len(out) == 1:
        raise PreconditionError("give --even-basis and/or --odd-basis")
    if cfg.format == "csv":
        cols = [out[p]["coefficients"] for p in ("even", "odd") if p in out]
        return _csv(("n", *[p for p in ("even", "odd") if p in out]), _coeff_rows(*cols))
    return dumps(out)


def cmd_ortho(cfg: JobConfig) -> str:
    basis = cfg.basis()
    fams = {}
    for parity, gen in (("even", basis.even), ("odd", basis.odd)):
        if gen is not None:
            fams[parity] = ortho.gram_schmidt(basis, parity, cfg.N, mode=cfg.harmonics)
    out = {"L": basis.L, **{p: ortho_to_dict(ob) for p, ob in fams.items()}}
    if cfg.function is not None:
        f = cfg.target()
        _check_period(f, basis.L)
        ps = ortho.project(f, fams.get("even"), fams.get("odd"))
        ns = ortho.to_nonorthogonal(ps, basis)
        out["projection"] = ortho_spectrum_to_dict(ps)
        out["projection"]["A_n"] = ns.A
        out["projection"]["B_n"] = ns.B
        out["projection"]["parseval_sum"] = ortho.parseval_sum(ps)
        out["projection"]["mean_square"] = f.norm_sq() / f.period
    if cfg.format == "csv":
        rows = []
        for p, ob in fams.items():
            for n in range(ob.N):
                rows.append((p, n + 1, ob.norms_sq[n], *[ob.mix[n, i] for i in range(ob.N)]))
        header = ("parity", "n", "norm_sq", *[f"mix_{i + 1}" for i in range(cfg.N)])
        return _csv(header, rows)
    return dumps(out)


def _expansion(cfg: JobConfig):
    f = cfg.target()
    basis = cfg.basis()
    _check_period(f, basis.L)
    return f, convert.expand_general(f, basis, cfg.N)


def cmd_eval(cfg: JobConfig) -> str:
    f, s = _expansion(cfg)
    x = analysis.offset_grid(f.L, cfg.grid)
    y = analysis.eval_partial_sum(s, cfg.N, x, mode=cfg.harmonics)
    if cfg.format == "svg":
        return analysis.svg_plot(x, [("f", f(x)), (f"S_{cfg.N}", y)], title=f.to_text())
    if cfg.format == "csv":
        return _csv(("x", "f", "partial_sum"), zip(x, f(x), y))
    return dumps({"x": x, "f": f(x), "partial_sum": y, "N": cfg.N, "mode": cfg.harmonics})


def _n_list(N: int, explicit) -> list[int]:
    if explicit:
        return sorted({int(v) for v in explicit.split(",")})
    out = []
    n = 1
    while n < N:
        out.append(n)
        n *= 2
    return out + [N]


def cmd_compare(cfg: JobConfig) -> str:
    f = cfg.target()
    sources = [s for s in cfg.extra.get("bases", "").split(",") if s.strip()]
    if not sources:
        raise PreconditionError("give the bases to compare with --bases a.fn,b.fn")
    Ns = _n_list(cfg.N, cfg.extra.get("n_list"))
    bases = []
    for src in sources:
        g, gs, parity = load_generator(src.strip(), max(Ns))
        _check_period(f, g.L)
        if parity == "even":
            basis = convert.GeneratorBasis(convert.Generator(gs, g))
        elif parity == "odd":
            basis = convert.GeneratorBasis(None, convert.Generator(gs, g))
        else:
            basis = convert.GeneratorBasis.from_mixed(g, N=max(Ns))
        bases.append((_basis_name(src), basis))
    reports = analysis.compare_bases(f, bases, Ns, grid=cfg.grid, mode=cfg.harmonics)
    if cfg.format == "json":
        return dumps([{"basis": r.basis, "N": r.N_values, "l2_error": r.l2_error, "sup_error": r.sup_error}
                      for r in reports])
    if cfg.format == "svg":
        raise PreconditionError("compare writes csv or json")
    return analysis.report_csv(reports)


def _basis_name(src: str) -> str:
    src = src.strip()
    base = src.rsplit("/", 1)[-1]
    return base[:-3] if base.endswith(".fn") else base


def cmd_quasisin(cfg: JobConfig) -> str:
    text = cfg.extra.get("kernel")
    if text is None:
        raise PreconditionError("give the kernel with --kernel")
    L = cfg.extra.get("L")
    kernel = quasisin.Kernel.parse(read_function_text(text)[0], L)
    q = quasisin.make(kernel, cfg.extra.get("kind", quasisin.SINE))
    if cfg.extra.get("smooth"):
        q = quasisin.smooth(q)
    for _ in range(cfg.extra.get("quarter", 0)):
        q = quasisin.shift_quarter(q)
    if cfg.extra.get("renormalize"):
        q = quasisin.renormalize(q, cfg.extra["renormalize"])
    s = compute_spectrum(q.body, cfg.N)
    if cfg.format == "svg":
        x = np.linspace(-q.L, q.L, cfg.grid + 1)
        return analysis.svg_plot(x, [(q.kind, q(x))], title=q.body.to_text())
    if cfg.format == "csv":
        return _csv(("n", "a", "b"), _coeff_rows(s.a, s.b))
    par, half = q.symmetry_residuals()
    return dumps({
        "kind": q.kind,
        "L": q.L,
        "kernel": q.kernel.to_text(),
        "function": q.body.to_text(),
        "smoothing": [{"kind": c.kind, "location": c.location, "amount": c.amount, "note": c.note}
                      for c in q.smoothing],
        "residual_defects": [{"x": x, "value_jump": v, "slope_jump": d} for x, v, d in q.residual],
        "symmetry_residuals": {"parity": par, "half_wave": half},
        "spectrum": spectrum_to_dict(s),
    })


def cmd_plot(cfg: JobConfig) -> str:
    f = cfg.target()
    x = np.linspace(-f.L, f.L, cfg.grid + 1)
    curves = [("f", f(x))]
    if cfg.even_basis or cfg.odd_basis or cfg.mixed_basis:
        basis = cfg.basis()
        _check_period(f, basis.L)
        s = convert.expand_general(f, basis, cfg.N)
        for n in _n_list(cfg.N, cfg.extra.get("n_list")):
            curves.append((f"S_{n}", analysis.eval_partial_sum(s, n, x, mode=cfg.harmonics)))
    if cfg.format == "csv":
        return _csv(("x", *[c[0] for c in curves]), zip(x, *[c[1] for c in curves]))
    return analysis.svg_plot(x, curves, title=f.to_text())


def _check_period(f: PiecewiseFunction, L: float):
    if not np.isclose(f.L, L, rtol=1e-12):
        raise PreconditionError(f"function half-period {f.L:g} differs from the basis half-period {L:g}")


COMMANDS = {
    "coeffs": cmd_coeffs,
    "expand": cmd_expand,
    "invert": cmd_invert,
    "ortho": cmd_ortho,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "quasisin": cmd_quasisin,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsfourier", description="Non-sinusoidal Fourier expansions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, function=True, basis=True, default_format="json"):
        if function:
            p.add_argument("-f", "--function", help="piecewise function: inline DSL text or a file")
        if basis:
            p.add_argument("--even-basis", help="even generator (file or inline DSL)")
            p.add_argument("--odd-basis", help="odd generator (file or inline DSL)")
            p.add_argument("--mixed-basis", help="generator of no parity, split into even and odd parts")
        p.add_argument("-N", type=int, default=64, help="number of terms (default 64)")
        p.add_argument("-o", "--output", help="output file (default stdout)")
        p.add_argument("--format", choices=FORMATS, default=default_format)
        p.add_argument("--grid", type=int, default=analysis.DEFAULT_GRID, help="sample points")
        h = p.add_mutually_exclusive_group()
        h.add_argument("--exact-harmonics", dest="harmonics", action="store_const", const=analysis.EXACT,
                       help="use the dilated generator functions themselves (default)")
        h.add_argument("--series-harmonics", dest="harmonics", action="store_const", const=analysis.SERIES,
                       help="use band-limited sinusoidal series of the harmonics")
        p.set_defaults(harmonics=analysis.EXACT)
        return p

    common(sub.add_parser("coeffs", help="sinusoidal spectrum of a function"), basis=False)
    common(sub.add_parser("expand", help="coefficients over a generator basis"))
    common(sub.add_parser("invert", help="generator expanded over the harmonics of the function"))
    common(sub.add_parser("ortho", help="Gram-Schmidt orthogonalisation, optionally projecting -f"))
    common(sub.add_parser("eval", help="partial sum on a grid"), default_format="csv")
    p = common(sub.add_parser("compare", help="error table across bases"), basis=False, default_format="csv")
    p.add_argument("--bases", required=True, help="comma-separated generator files")
    p.add_argument("--n-list", help="comma-separated N values (default powers of two up to N)")
    p = common(sub.add_parser("quasisin", help="build a quasi-sinusoid from a kernel"), function=False, basis=False)
    p.add_argument("--kernel", required=True, help="kernel on [0, L/2]: P[0 | ... | L/2] or a formula with --L")
    p.add_argument("--kind", choices=(quasisin.SINE, quasisin.COSINE), default=quasisin.SINE)
    p.add_argument("--L", type=float, help="half-period when the kernel is a bare formula")
    p.add_argument("--smooth", action="store_true", help="add pulse/ramp corrections")
    p.add_argument("--quarter", type=int, default=0, help="number of quarter-period shifts")
    p.add_argument("--renormalize", type=float, help="compress the period by this factor")
    p = common(sub.add_parser("plot", help="SVG of the function and its partial sums"), default_format="svg")
    p.add_argument("--n-list", help="comma-separated partial sums to draw")
    return parser


_EXTRA = ("bases", "n_list", "kernel", "kind", "L", "smooth", "quarter", "renormalize")


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    extra = {k: getattr(ns, k) for k in _EXTRA if getattr(ns, k, None) is not None}
    return JobConfig(
        command=ns.command,
        function=getattr(ns, "function", None),
        even_basis=getattr(ns, "even_basis", None),
        odd_basis=getattr(ns, "odd_basis", None),
        mixed_basis=getattr(ns, "mixed_basis", None),
        N=ns.N,
        format=ns.format,
        output=ns.output,
        grid=ns.grid,
        harmonics=ns.harmonics,
        extra=extra,
    )


def run(cfg: JobConfig) -> str:
    text = COMMANDS[cfg.command](cfg)
    if cfg.output:
        atomic_write(cfg.output, text)
    return text


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        text = run(cfg)
    except NSFourierError as exc:
        print(f"nsfourier {ns.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"nsfourier {ns.command}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"nsfourier {ns.command}: {exc}", file=sys.stderr)
        return PreconditionError.exit_code
    if not cfg.output:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
