"""Acceptance criteria, one test per criterion.

Each test records a ``PASS criterion k: ...`` or ``FAIL criterion k: ...`` line,
shown in the terminal summary, and then asserts the criterion as stated.
"""

import filecmp
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np

from conftest import ACCEPTANCE_LINES
from nsfourier import standard
from nsfourier.convert import (
    GeneratorBasis,
    dirichlet_multiply,
    dirichlet_solve,
    expand_general,
    invert_expansion,
    reconstruct_sin,
)
from nsfourier.ortho import gram_schmidt, parseval_sum, project
from nsfourier.piecewise import PiecewiseFunction
from nsfourier.spectrum import compute_spectrum, differentiate, integrate

P = PiecewiseFunction.parse
pi = math.pi
n64 = np.arange(1, 65)
SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def verdict(k: int, checks: dict[str, bool], detail: str = ""):
    failed = [name for name, ok in checks.items() if not ok]
    status = "FAIL" if failed else "PASS"
    line = f"{status} criterion {k}: " + (f"failed {', '.join(failed)}" if failed else "all checks hold")
    if detail:
        line += f" | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failed, line


def close(x, y, *, rtol=0.0, atol=0.0) -> bool:
    return bool(np.allclose(np.asarray(x, float), np.asarray(y, float), rtol=rtol, atol=atol))


def dense_oracle(target, gen, N):
    M = np.zeros((N, N))
    for k in range(1, N + 1):
        for i in range(1, N // k + 1):
            M[k * i - 1, k - 1] = gen[i - 1]
    A = np.zeros(N)
    for m in range(N):
        A[m] = (target[m] - M[m, :m] @ A[:m]) / M[m, m]
    return A


def basis_of(even=None, odd=None, N=64):
    fn = standard.function
    return GeneratorBasis.from_functions(fn(even) if even else None, fn(odd) if odd else None, N=N)


def test_criterion_1_square_pulse_table():
    table = np.array([-2 / pi, 1 / (2 * pi), -8 / (9 * pi), 1 / (8 * pi), 8 / (25 * pi), 2 / (9 * pi),
                      -16 / (49 * pi), 1 / (32 * pi), -8 / (81 * pi), -2 / (25 * pi), -24 / (121 * pi),
                      1 / (18 * pi)])
    a = 4 * (-1.0) ** n64 / (n64**2 * pi**2)
    c = 2 / (n64 * pi) * np.sin(n64 * pi / 2)
    closed = dirichlet_solve(a, c, 12)
    quad = expand_general(standard.function("parabola"), basis_of("square_pulse"), 12).A
    verdict(1, {
        "closed-form inputs 1e-12": close(closed, table, rtol=1e-12),
        "quadrature inputs 1e-6": close(quad, table, rtol=1e-6),
    }, f"max quadrature rel dev {np.max(np.abs(quad / table - 1)):.2e}")


def test_criterion_2_triangle_table():
    N = 64
    a = 4 * (-1.0) ** n64 / (n64**2 * pi**2)
    c = np.where(n64 % 2 == 1, -4 / (n64**2 * pi**2), 0.0)
    expected = np.zeros(N)
    expected[0] = 1.0
    for k in range(1, 7):
        expected[2**k - 1] = -(4.0**-k)
    A = dirichlet_solve(a, c, N)
    verdict(2, {
        "solver 1e-12": close(A, expected, atol=1e-12),
        "dense oracle 1e-12": close(dense_oracle(a, c, N), expected, atol=1e-12),
    })


def test_criterion_3_square_in_sawtooth():
    N = 16
    b = np.where(n64 % 2 == 1, 4 / (n64 * pi), 0.0)
    d = 2 * (-1.0) ** (n64 + 1) / (n64 * pi)
    expected = np.zeros(N)
    expected[[0, 1, 3, 7, 15]] = [2, 1, 1, 1, 1]
    B = dirichlet_solve(b, d, N)
    Bq = expand_general(standard.function("odd_square"), basis_of(odd="sawtooth"), N).B
    printed = {8: 0.5, 10: 0.2, 15: -2 / 15}
    errata = {k: v for k, v in printed.items() if abs(B[k - 1] - v) > 1e-6}
    note = "; ".join(f"printed B{k}={v:.6g} vs solved {B[k - 1]:.6g} (erratum)" for k, v in errata.items())
    verdict(3, {
        "solver": close(B, expected, atol=1e-12),
        "dense oracle": close(dense_oracle(b, d, N), expected, atol=1e-12),
        "quadrature route": close(Bq, expected, atol=1e-9),
        "printed B8, B10, B15 flagged": set(errata) == {8, 10, 15},
    }, note)


def test_criterion_4_sin_in_square():
    s = expand_general(standard.function("pi_sine"), basis_of(odd="pi_square", N=16), 16)
    got = s.B[[0, 2, 4, 6, 8]]
    verdict(4, {"B1,B3,B5,B7,B9 1e-12": close(got, [pi / 4, -pi / 12, -pi / 20, -pi / 28, 0], atol=1e-12)})


def test_criterion_5_sin_in_triangle():
    s = expand_general(standard.function("pi_sine"), basis_of(odd="pi_triangle", N=16), 16)
    k = np.arange(1, 5)
    formula = (pi / 4) * (-1.0) ** k / (2 * k - 1) ** 2
    got = s.B[[0, 2, 4, 6]]
    bad = [int(2 * j - 1) for j, g, f in zip(k, got, formula) if abs(g - f) > 1e-12]
    detail = (f"computed B1,B3,B5,B7 = {', '.join(f'{v:.12g}' for v in got)}; formula gives "
              f"{', '.join(f'{v:.12g}' for v in formula)}; B1 = b1/d1 = pi/4 > 0 for any positive "
              f"leading sine coefficient, so the formula's n=1 sign cannot hold")
    verdict(5, {
        "formula n=1..4": not bad,
        "B9 = 0": abs(s.B[8]) <= 1e-12,
    }, detail)


def test_criterion_6_exponential_basis():
    N = 12
    basis = basis_of("cosh", "sinh", N=64)  # quadrature-derived c, d
    odd_idx = (n64 % 2 == 1)
    a = np.where(odd_idx, (-1.0) ** ((n64 - 1) // 2) * 4 / (n64 * pi), 0.0)
    b = np.where(odd_idx, 4 / (n64 * pi), 0.0)
    A = dirichlet_solve(a, basis.c, N)
    B = dirichlet_solve(b, basis.d, N)
    s1 = math.sinh(1)
    K1 = -2 * (1 + pi**2) / (pi * s1)
    K2 = -K1 / pi
    exp_A = [K1, K1 * (1 + pi**2) / (1 + 4 * pi**2), -K1 * (4 / 3) * (1 + 3 * pi**2) / (1 + 9 * pi**2)]
    exp_B = [K2, 2 * K2 * (1 + pi**2) / (1 + 4 * pi**2), -K2 * (8 / 3) / (1 + 9 * pi**2)]
    # the whole pipeline on the step function; its even part is the negated listed a_n
    full = expand_general(standard.function("step_example"), basis, N)
    verdict(6, {
        "A1..A3 1e-9": close(A[:3], exp_A, atol=1e-9),
        "B1..B3 1e-9": close(B[:3], exp_B, atol=1e-9),
        "full pipeline B": close(full.B[:3], exp_B, atol=1e-9),
    }, f"full-pipeline A1..A3 = {', '.join(f'{v:.12g}' for v in full.A[:3])} (even part of the step "
       f"function has a1 = -4/pi, the listed a_n use +4/pi)")


def test_criterion_7_quasi_sinusoid():
    q = standard.function("quad_cos")
    a = compute_spectrum(q, 16).a
    k = np.arange(1, 9)
    spec_ok = close(a[0::2], 32 * (-1.0) ** (k + 1) / ((2 * k - 1) ** 3 * pi**3), atol=1e-9)
    f = standard.function("neg_half_quad_cos")
    sq = expand_general(f, basis_of("square_pulse"), 12).A
    tri = expand_general(f, basis_of("triangle"), 12).A
    sq_table = np.array([-8, -64 / 27, 192 / 125, -384 / 343, 64 / 729, -960 / 1331]) / pi**2
    tri_table = np.array([4, -16 / 27, -16 / 125, -32 / 343, 16 / 729, -48 / 1331]) / pi
    fs = compute_spectrum(f, 12)
    inv_sq = invert_expansion(compute_spectrum(standard.function("square_pulse"), 12), fs, 12, "even")
    # the inverse triangle table is that of the triangle wave 1/2 - |x|
    down_triangle = P("P[-1 | x + 1/2 | 0 | 1/2 - x | 1]")
    inv_tri = invert_expansion(compute_spectrum(down_triangle, 12), fs, 12, "even")
    inv_sq_table = np.array([-1 / 8, 1 / 27, -3 / 125, 6 / 343, -1 / 81, 15 / 1331]) * pi**2
    inv_tri_table = np.array([-1 / 4, -1 / 27, -1 / 125, -2 / 343, -1 / 243, -3 / 1331]) * pi
    verdict(7, {
        "cosine coefficients": spec_ok,
        "square-basis table": close(sq[0::2], sq_table, atol=1e-9) and close(sq[1::2], 0, atol=1e-9),
        "triangle-basis table": close(tri[0::2], tri_table, atol=1e-9) and close(tri[1::2], 0, atol=1e-9),
        "inverse square table": close(inv_sq[0::2], inv_sq_table, atol=1e-9),
        "inverse triangle table": close(inv_tri[0::2], inv_tri_table, atol=1e-9),
    }, "inverse triangle table read with the triangle wave 1/2-|x|; |x|-1/2 gives the negated table")


def test_criterion_8_gram_schmidt():
    ob = gram_schmidt(basis_of("square_wave"), "even", 5)
    G = ob.gram
    orth = ob.mix @ G @ ob.mix.T
    scale = np.sqrt(np.outer(ob.norms_sq, ob.norms_sq))
    off = float(np.max(np.abs(orth - np.diag(np.diag(orth))) / scale))
    phi5 = ob.mix[4]
    variants = {"-(9/40)g1-(3/40)g3": [-9 / 40, 0, -3 / 40, 0, 1], "-(17/40)g1-(3/40)g3": [-17 / 40, 0, -3 / 40, 0, 1]}
    var_txt = "; ".join(f"printed {name}: max |<., g_i>|, i<5 = {np.max(np.abs(np.asarray(v) @ G[:, :4])):.4g}"
                        for name, v in variants.items())
    detail = (f"oracle Phi3 = g3 + ({ob.mix[2, 0]:+.12g}) g1 since <g3,g1> = {G[2, 0]:.12g}; "
              f"oracle Phi5 = g5 + ({phi5[0]:+.12g}) g1 + ({phi5[2]:+.3g}) g3, |Phi5|^2 = {ob.norms_sq[4]:.12g}; "
              f"{var_txt}; printed |Phi5|^2 = 1607/800 = {1607 / 800}")
    verdict(8, {
        "Phi3 = g3 - g1/3": abs(ob.mix[2, 0] - (-1 / 3)) <= 1e-10,
        "|Phi3|^2 = 16/9": abs(ob.norms_sq[2] - 16 / 9) <= 1e-10,
        "|Phi1|^2 = |Phi2|^2 = |Phi4|^2 = 2": close(ob.norms_sq[[0, 1, 3]], 2, atol=1e-10),
        "off-diagonal <= 1e-8": off <= 1e-8,
    }, detail)


def test_criterion_9_property_suites():
    N = 32
    checks = {}
    post = linear = scaling = oracle = True
    for seed in range(200):
        rng = np.random.default_rng(seed)
        t = rng.normal(size=N)
        u = rng.normal(size=N)
        g = rng.normal(size=N)
        g[0] = rng.choice([-1, 1]) * rng.uniform(0.5, 2.0)
        A = dirichlet_solve(t, g, N)
        scale = max(1.0, np.max(np.abs(A)))
        post &= close(dirichlet_multiply(A, g, N), t, atol=1e-12 * max(1.0, np.max(np.abs(t))) * scale)
        oracle &= close(A, dense_oracle(t, g, N), rtol=1e-12, atol=1e-12 * scale)
        alpha, beta = rng.normal(size=2)
        Au = dirichlet_solve(u, g, N)
        lin = dirichlet_solve(alpha * t + beta * u, g, N)
        linear &= close(lin, alpha * A + beta * Au, atol=1e-12 * max(1.0, np.max(np.abs(lin))) * scale)
        s = rng.uniform(0.5, 2.0)
        scaling &= close(dirichlet_solve(t, s * g, N), A / s, rtol=1e-12, atol=1e-12 * scale)
    checks["Dirichlet post-condition"] = post
    checks["dense-oracle equivalence"] = oracle
    checks["linearity"] = linear
    checks["scaling"] = scaling

    f = standard.function("step_example")
    basis = basis_of("triangle", "odd_triangle")
    s = expand_general(f, basis, 32)
    back = reconstruct_sin(s)
    ref = compute_spectrum(f, 32)
    checks["round trip"] = close(back.a, ref.a, atol=1e-12) and close(back.b, ref.b, atol=1e-12)

    f0, fe, fo = f.parity_split()
    x = np.linspace(-0.99, 0.99, 397)
    checks["parity split"] = close(fe(x), fe(-x), atol=1e-14) and close(fo(x), -fo(-x), atol=1e-14) \
        and close(f0 + fe(x) + fo(x), f(x), atol=1e-14)
    se, so = compute_spectrum(fe, 16), compute_spectrum(fo, 16)
    checks["parity spectra"] = close(se.b, 0, atol=1e-13) and close(so.a, 0, atol=1e-13)

    g = standard.function("quad_cos")
    ok = True
    for k in (2, 3, 5):
        h = g.harmonic(k)
        ok &= close(h(x), g(k * x), atol=1e-13)
    checks["harmonic dilation"] = ok

    ev = gram_schmidt(basis_of("square_pulse", "odd_square"), "even", 12)
    od = gram_schmidt(basis_of("square_pulse", "odd_square"), "odd", 12)
    run = parseval_sum(project(f, ev, od))
    checks["Parseval monotone"] = bool(np.all(np.diff(run) >= -1e-12)) and run[-1] <= f.norm_sq() / f.period + 1e-9
    verdict(9, checks)


def test_criterion_10_calculus():
    N = 32
    sq = compute_spectrum(P("P[-1 | x^2 | 1]"), N)
    lin = compute_spectrum(P("P[-1 | 2*x | 1]"), N)
    d = differentiate(sq, 0.0)
    ramp, back = integrate(lin, d0=sq.f0)
    verdict(10, {
        "differentiate": close(d.a, lin.a, atol=1e-9) and close(d.b, lin.b, atol=1e-9) and abs(d.f0) <= 1e-9,
        "integrate inverts": abs(ramp) <= 1e-9 and close(back.a, sq.a, atol=1e-9) and close(back.b, sq.b, atol=1e-9),
    })


def test_criterion_11_determinism(tmp_path):
    env = dict(os.environ, NSFOURIER=f"{sys.executable} -m nsfourier")
    runs = [tmp_path / "first", tmp_path / "second"]
    for out in runs:
        subprocess.run(["bash", str(SCRIPTS / "run_all.sh"), str(out)], check=True, env=env,
                       capture_output=True, text=True)
    names = sorted(p.relative_to(runs[0]) for p in runs[0].rglob("*") if p.is_file())
    others = sorted(p.relative_to(runs[1]) for p in runs[1].rglob("*") if p.is_file())
    scripts = sorted(p.stem for p in SCRIPTS.glob("*.sh") if p.stem != "run_all")
    produced = sorted({n.parts[0] for n in names})
    differing = [str(n) for n in names if not filecmp.cmp(runs[0] / n, runs[1] / n, shallow=False)]
    verdict(11, {
        "every script produced output": produced == scripts,
        "same file sets": names == others,
        "byte-identical": not differing,
    }, f"{len(names)} files from {len(scripts)} scripts" + (f"; differing: {differing}" if differing else ""))
