"""Named functions and generators used by the worked examples, scripts and tests.

Every entry is DSL text, so the same definitions can be written to basis files
and read back through the command line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .piecewise import PiecewiseFunction


@dataclass(frozen=True)
class Named:
    text: str
    parity: str  # 'even', 'odd' or 'mixed'
    description: str

    def function(self) -> PiecewiseFunction:
        return PiecewiseFunction.parse(self.text)

    def file_text(self) -> str:
        return f"# parity: {self.parity}\n# {self.description}\n{self.text}\n"


_CH = math.cosh(0.5)

CATALOGUE: dict[str, Named] = {
    # unit half-period targets
    "parabola": Named("P[-1 | x^2 | 1]", "even", "x^2 on [-1, 1] (mean 1/3)"),
    "sawtooth": Named("P[-1 | x | 1]", "odd", "sawtooth x on [-1, 1]"),
    "sine": Named("P[-1 | sin(pi*x) | 1]", "odd", "sin(pi x)"),
    "odd_square": Named("P[-1 | -1 | 0 | 1 | 1]", "odd", "odd unit square wave"),
    "step_example": Named("P[-1 | 0 | -1/2 | -2 | 0 | 0 | 1/2 | 2 | 1]", "mixed",
                          "mixed step function used with the exponential basis"),
    "cos_half": Named("P[-1 | cos(pi*x/2) | 1]", "even", "cos(pi x/2) on [-1, 1]"),
    # even generators
    "square_pulse": Named("P[-1 | 0 | -1/2 | 1 | 1/2 | 0 | 1]", "even",
                          "unit pulse of width 1 centred at 0 (mean 1/2)"),
    "square_wave": Named("P[-1 | 1 | -1/2 | -1 | 1/2 | 1 | 1]", "even",
                         "even square wave, -1 on the middle half"),
    "triangle": Named("P[-1 | -x-1/2 | 0 | x-1/2 | 1]", "even", "triangle wave |x| - 1/2"),
    "cosh": Named("P[-1 | cosh(x) - sinh(1) | 1]", "even", "cosh x - sinh 1"),
    "quad_cos": Named("P[-1 | -1 + 4*(x+1)^2 | -1/2 | 1 - 4*x^2 | 1/2 | -1 + 4*(x-1)^2 | 1]", "even",
                      "cosine-like quasi-sinusoid C[1-x^2] compressed onto [-1, 1]"),
    "neg_half_quad_cos": Named(
        "P[-1 | 1/2 - 2*(x+1)^2 | -1/2 | -1/2 + 2*x^2 | 1/2 | 1/2 - 2*(x-1)^2 | 1]", "even",
        "minus one half of the compressed C[1-x^2]"),
    "q1": Named("P[-1 | 1 - x^2 | 1]", "even", "1 - x^2"),
    "q2": Named("P[-1 | 1 - abs(x)^1.75 | 1]", "even", "1 - |x|^1.75"),
    # odd generators
    "sinh": Named("P[-1 | sinh(x) | 1]", "odd", "sinh x"),
    "odd_triangle": Named("P[-1 | -x-1 | -1/2 | x | 1/2 | 1-x | 1]", "odd",
                          "sine-like triangle wave S[x]"),
    "cosh_quasi": Named(
        f"P[-1 | (cosh(x + 0.5) - {_CH!r})/({_CH!r} - 1) | 0 | ({_CH!r} - cosh(x - 0.5))/({_CH!r} - 1) | 1]",
        "odd", "exponential sine-like quasi-sinusoid with unit peaks"),
    # half-period pi
    "pi_square": Named("P[-pi | -1 | 0 | 1 | pi]", "odd", "odd square wave on [-pi, pi]"),
    "pi_triangle": Named("P[-pi | -x-pi | -pi/2 | x | pi/2 | pi-x | pi]", "odd",
                         "sine-like triangle S[x] on [-pi, pi]"),
    "pi_sine": Named("P[-pi | sin(x) | pi]", "odd", "sin x on [-pi, pi]"),
}


def get(name: str) -> Named:
    try:
        return CATALOGUE[name]
    except KeyError:
        raise KeyError(f"unknown standard function {name!r}; known: {', '.join(sorted(CATALOGUE))}") from None


def function(name: str) -> PiecewiseFunction:
    return get(name).function()
