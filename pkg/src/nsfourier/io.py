"""Serialisation: JSON with 17-significant-digit floats, basis files, atomic writes."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .convert import Generator, GeneratorBasis, NonSinSpectrum
from .errors import ParityError
from .ortho import OrthoBasis, OrthoSpectrum
from .piecewise import PiecewiseFunction
from .spectrum import SinSpectrum, compute_spectrum

PARITY_TOL = 1e-9


def format_float(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ValueError("cannot serialise a non-finite number")
    text = format(v, ".17g")
    if "e" in text or "." in text:
        return text
    return text + ".0"


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _dump(obj, 0, indent) + "\n"


def _dump(obj, level: int, indent: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, level + 1, indent)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_dump(v, level + 1, indent) for v in obj) + "]"
        items = [pad + _dump(v, level + 1, indent) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- spectra ---------------------------------------------------------------


def spectrum_to_dict(s: SinSpectrum) -> dict:
    return {"L": s.L, "f0": s.f0, "a": s.a, "b": s.b}


def spectrum_from_dict(d: dict) -> SinSpectrum:
    return SinSpectrum(d["L"], d["f0"], d["a"], d["b"])


def _fn_text(g) -> str | None:
    return None if g is None or g.function is None else g.function.to_text()


def nonsin_to_dict(s: NonSinSpectrum) -> dict:
    return {
        "f0": s.f0,
        "A": s.A,
        "B": s.B,
        "basis": {"even": _fn_text(s.basis.even), "odd": _fn_text(s.basis.odd), "g0": s.basis.g0},
    }


def ortho_to_dict(ob: OrthoBasis) -> dict:
    rows = [ob.mix[n, : n + 1] for n in range(ob.N)]
    return {
        "parity": ob.parity,
        "mode": ob.mode,
        "interval": list(ob.interval),
        "mix": rows,
        "norms_sq": ob.norms_sq,
    }


def ortho_spectrum_to_dict(s: OrthoSpectrum) -> dict:
    return {"A0": s.mean, "A0_n": s.A0, "B0_n": s.B0}


# -- basis files -------------------------------------------------------------


def read_function_text(source: str) -> tuple[str, dict]:
    """Return ``(dsl_text, header)`` from a file path or inline DSL text.

    Lines starting with ``#`` are comments; ``# key: value`` lines form the header.
    Exactly one function per file.
    """
    path = Path(source)
    text = path.read_text(encoding="utf-8") if _looks_like_path(source) else source
    header: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep:
                header[key.strip().lower()] = value.strip().lower()
            continue
        body.append(stripped)
    if len(body) != 1:
        raise ValueError(f"expected exactly one function, found {len(body)} lines in {source!r}")
    return body[0], header


def _looks_like_path(source: str) -> bool:
    s = source.strip()
    if s.startswith("P[") or s.startswith("P "):
        return False
    return os.path.exists(s) or s.endswith(".fn")


def detect_parity(s: SinSpectrum) -> str:
    scale = max(1.0, float(np.max(np.abs(np.concatenate([s.a, s.b, [s.f0]])))))
    odd_part = float(np.max(np.abs(s.b)))
    even_part = max(float(np.max(np.abs(s.a))), 0.0)
    if odd_part <= PARITY_TOL * scale:
        return "even"
    if even_part <= PARITY_TOL * scale and abs(s.f0) <= PARITY_TOL * scale:
        return "odd"
    return "mixed"


def load_generator(source: str, N: int, expect: str | None = None):
    """Parse a basis function and verify (never trust) its ``# parity:`` hint.

    Returns ``(function, spectrum, parity)``.
    """
    text, header = read_function_text(source)
    fn = PiecewiseFunction.parse(text)
    spec = compute_spectrum(fn, N)
    parity = detect_parity(spec)
    hint = header.get("parity")
    if hint is not None and hint != parity:
        raise ParityError(f"{source}: header says parity {hint!r} but the function is {parity}")
    if expect is not None and parity != expect:
        raise ParityError(f"{source}: expected a generator of {expect} parity, the function is {parity}")
    return fn, spec, parity


def basis_from_sources(N: int, even: str | None = None, odd: str | None = None,
                       mixed: str | None = None) -> GeneratorBasis:
    if mixed is not None:
        if even is not None or odd is not None:
            raise ValueError("a mixed generator already supplies both parities")
        fn, _, _ = load_generator(mixed, N, "mixed")
        return GeneratorBasis.from_mixed(fn, N=N)
    ev = od = None
    if even is not None:
        fn, spec, _ = load_generator(even, N, "even")
        ev = Generator(spec, fn)
    if odd is not None:
        fn, spec, _ = load_generator(odd, N, "odd")
        od = Generator(spec, fn)
    if ev is None and od is None:
        raise ValueError("no basis given")
    return GeneratorBasis(ev, od)
