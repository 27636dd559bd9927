import csv
import io
import math
import xml.etree.ElementTree as ET

import mpmath
import numpy as np
import pytest

from nsfourier import standard
from nsfourier.analysis import (
    CSV_HEADER,
    EXACT,
    SERIES,
    compare_bases,
    error_report,
    eval_partial_sum,
    l2_error,
    offset_grid,
    overshoot,
    report_csv,
    svg_plot,
    sup_error,
)
from nsfourier.convert import GeneratorBasis, expand_general
from nsfourier.errors import PreconditionError
from nsfourier.ortho import gram_schmidt, project, to_nonorthogonal
from nsfourier.spectrum import compute_spectrum, eval_series


def basis_of(even=None, odd=None, N=128):
    fn = standard.function
    return GeneratorBasis.from_functions(fn(even) if even else None, fn(odd) if odd else None, N=N)


@pytest.fixture(scope="module")
def parabola_in_triangle():
    return expand_general(standard.function("parabola"), basis_of("triangle"), 128)


def test_offset_grid_avoids_boundaries():
    x = offset_grid(1.0, 4096)
    assert len(x) == 4096 and x[0] > -1 and x[-1] < 1
    assert not np.any(np.isclose(x * 8, np.round(x * 8), atol=1e-12, rtol=0))


def test_partial_sum_at_origin(parabola_in_triangle):
    assert eval_partial_sum(parabola_in_triangle, 1, 0.0) == pytest.approx(-1 / 6, abs=1e-12)
    assert eval_partial_sum(parabola_in_triangle, 0, 0.3) == pytest.approx(1 / 3, abs=1e-12)


def test_partial_sum_beyond_stored_order(parabola_in_triangle):
    with pytest.raises(PreconditionError):
        eval_partial_sum(parabola_in_triangle, 129, 0.0)


def test_sinusoidal_generator_matches_plain_series():
    f = standard.function("step_example")
    spec = compute_spectrum(f, 24)
    s = expand_general(f, GeneratorBasis.sinusoidal(1.0, 24), 24)
    x = offset_grid(1.0, 1000)
    for mode in (EXACT, SERIES):
        np.testing.assert_allclose(eval_partial_sum(s, 24, x, mode=mode), eval_series(spec, x), atol=1e-12)


def test_square_in_sawtooth_slow_convergence():
    s = expand_general(standard.function("odd_square"), basis_of(odd="sawtooth", N=64), 64)
    assert abs(eval_partial_sum(s, 16, 0.5) - 1) <= 0.15
    assert abs(eval_partial_sum(s, 16, 0.5, mode=SERIES) - 1) <= 0.15


def test_generator_expands_itself():
    f = standard.function("triangle")
    s = expand_general(f, basis_of("triangle"), 8)
    rep = error_report(f, s, [1])
    assert rep.l2_error[0] <= 1e-9


def test_l2_error_quarters_per_doubling(parabola_in_triangle):
    f = standard.function("parabola")
    e = np.array([l2_error(f, parabola_in_triangle, 2**k) for k in range(7)])
    # A_{2^k} = -4^-k: the squared error drops 16-fold, the norm 4-fold
    np.testing.assert_allclose(e[:-1] / e[1:], 4.0, rtol=1e-6)
    np.testing.assert_allclose((e[:-1] / e[1:]) ** 2, 16.0, rtol=1e-6)


def test_l2_error_against_grid_oracle(parabola_in_triangle):
    f = standard.function("parabola")
    h = 2 / 2**18
    x = -1 + h * (np.arange(2**18) + 0.5)
    for N in (1, 3, 12):
        r = f(x) - eval_partial_sum(parabola_in_triangle, N, x)
        assert l2_error(f, parabola_in_triangle, N) == pytest.approx(math.sqrt(h * np.sum(r**2)), rel=1e-6)


def test_triangle_beats_pulse():
    f = standard.function("parabola")
    tri = expand_general(f, basis_of("triangle"), 12)
    pulse = expand_general(f, basis_of("square_pulse"), 12)
    assert l2_error(f, tri, 12) < l2_error(f, pulse, 12)


def test_sup_error_non_negative(parabola_in_triangle):
    f = standard.function("parabola")
    assert sup_error(f, parabola_in_triangle, 4) >= 0


def test_compare_cosine_approximations():
    f = standard.function("cos_half")
    reps = compare_bases(f, [("q1", basis_of("q1", N=64)), ("q2", basis_of("q2", N=64))], [2, 4, 8, 16])
    q1, q2 = reps
    assert max(q1.sup_error) < 0.06 and max(q2.sup_error) < 0.06
    assert all(b < a for a, b in zip(q1.sup_error, q2.sup_error))
    # the one-term approximation by 1 - x^2 alone is just above the bound
    one = compare_bases(f, [("q1", basis_of("q1", N=64))], [1])[0]
    assert 0.06 < one.sup_error[0] < 0.062


def test_compare_single_sinusoidal_basis():
    f = standard.function("parabola")
    rep = compare_bases(f, [("sin", GeneratorBasis.sinusoidal(1.0, 16))], [16])[0]
    spec = compute_spectrum(f, 16)
    x = offset_grid(1.0)
    assert rep.sup_error[0] == pytest.approx(np.max(np.abs(f(x) - eval_series(spec, x))), rel=1e-9)


def test_compare_empty():
    assert compare_bases(standard.function("parabola"), [], [4]) == []
    assert report_csv([]) == ",".join(CSV_HEADER) + "\n"


def test_report_csv_schema():
    f = standard.function("parabola")
    reps = compare_bases(f, [("tri", basis_of("triangle"))], [1, 2])
    rows = list(csv.reader(io.StringIO(report_csv(reps))))
    assert tuple(rows[0]) == CSV_HEADER
    assert rows[1][:2] == ["tri", "1"] and rows[1][4] == ""
    assert float(rows[1][2]) == reps[0].l2_error[0]


def test_report_rejects_coarse_grid(parabola_in_triangle):
    with pytest.raises(ValueError):
        error_report(standard.function("parabola"), parabola_in_triangle, [1], grid=100)


def test_parseval_residual_monotone():
    f = standard.function("step_example")
    basis = basis_of("square_pulse", "odd_square", N=64)
    ev, od = gram_schmidt(basis, "even", 12), gram_schmidt(basis, "odd", 12)
    o = project(f, ev, od)
    rep = error_report(f, to_nonorthogonal(o), range(1, 13), ortho=o)
    pr = np.array(rep.parseval_residual)
    assert np.all(pr >= -1e-9) and np.all(np.diff(pr) <= 1e-12)
    assert np.all(np.diff(rep.l2_error) <= 1e-9)


def test_gibbs_overshoot_series_model():
    """Band-limited, the square-in-sawtooth partial sum is the plain Fourier partial sum of the square wave."""
    f = standard.function("odd_square")
    s = expand_general(f, basis_of(odd="sawtooth", N=64), 64)
    gibbs = float(mpmath.si(mpmath.pi) / mpmath.pi - 0.5)  # fraction of the jump
    for N in (16, 64):
        excess, height = overshoot(f, s, N, 0.0, mode=SERIES)
        assert height == 2.0
        assert 0.05 <= excess / height <= 0.25
        assert excess / height == pytest.approx(gibbs, rel=2e-2)


def test_overshoot_exact_model_does_not_vanish():
    f = standard.function("odd_square")
    s = expand_general(f, basis_of(odd="sawtooth", N=64), 64)
    ratios = [overshoot(f, s, N, 0.0)[0] / 2 for N in (16, 32, 64)]
    assert min(ratios) > 0.05


def test_svg_plot():
    x = np.linspace(-1, 1, 50)
    text = svg_plot(x, [("f <x>", x**2), ("S", x)], title="a & b")
    root = ET.fromstring(text)
    assert root.get("viewBox") == "0 0 800 500"
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 2
    assert len(lines[0].get("points").split()) == 50
