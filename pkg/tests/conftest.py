import itertools

import numpy as np
from scipy.optimize import linprog

from polylyap.contraction import sampled_decay_check, verify_certificate
from polylyap.polytope import VPolytope

# Acceptance verdicts, printed in the terminal summary.
ACCEPTANCE = {}

CROSS = VPolytope(np.array([[1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, -1.0]]))
NEG_I = -np.eye(2)
ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


def assert_sound(report, model, samples=1000):
    """Every Certified result must re-verify algebraically and by sampling."""
    if not report.certified:
        return
    cert = report.certificate
    assert cert is not None
    assert cert.eta > 0
    assert verify_certificate(cert, model)
    assert sampled_decay_check(cert, model, samples=samples, seed=12345)


def assert_monotone(report):
    for r in {e.restart for e in report.trace}:
        etas = [e.eta for e in report.trace if e.restart == r]
        assert all(b >= a - 1e-12 for a, b in zip(etas, etas[1:]))


def brute_force_lp(a, b, c, tol=1e-9):
    """Best objective over all basic feasible solutions (None if none)."""
    k, l = a.shape
    best = None
    for cols in itertools.combinations(range(l), k):
        bm = a[:, cols]
        if abs(np.linalg.det(bm)) < 1e-10:
            continue
        xb = np.linalg.solve(bm, b)
        if np.min(xb) < -tol:
            continue
        val = float(c[list(cols)] @ xb)
        best = val if best is None else max(best, val)
    return best


def highs_gap(v, a_list):
    """Gap LP in its natural variables (eta, M_b) solved by HiGHS."""
    n, m = v.shape
    nb = len(a_list)
    nv = 1 + nb * m * m
    a_eq, b_eq = [], []
    for b, a in enumerate(a_list):
        off = 1 + b * m * m
        av = a @ v
        for j in range(m):
            for i in range(n):
                row = np.zeros(nv)
                # (V M)_{ij} = sum_p V_ip M_pj, with M stored column-major.
                row[off + j * m: off + (j + 1) * m] = v[i]
                a_eq.append(row)
                b_eq.append(av[i, j])
            row = np.zeros(nv)
            row[0] = 1.0
            row[off + j * m: off + (j + 1) * m] = 1.0
            a_eq.append(row)
            b_eq.append(0.0)
    bounds = [(None, None)]
    for _ in range(nb):
        for j in range(m):
            for i in range(m):
                bounds.append((None, None) if i == j else (0.0, None))
    c = np.zeros(nv)
    c[0] = -1.0
    res = linprog(c, A_eq=np.array(a_eq), b_eq=np.array(b_eq), bounds=bounds, method="highs")
    return res


def random_absorbing(rng, n, m):
    from polylyap.polytope import random_init

    return random_init(n, m, int(rng.integers(1 << 30)))


def random_stable(rng, n, shift=0.5):
    a = rng.standard_normal((n, n))
    lam = np.max(np.linalg.eigvals(a).real)
    return a - (lam + shift) * np.eye(n)


def random_polygon_feasible(rng, m, shift=0.2, margin=0.7):
    """Random stable 2x2 matrix that an m-gon can certify.

    In modal coordinates a pair sigma +- i omega is a scaled rotation, and a
    regular m-gon contracts exactly when omega / |sigma| < cot(pi / m).
    """
    while True:
        a = random_stable(rng, 2, shift)
        lam = np.linalg.eigvals(a)
        if abs(lam[0].imag) < margin * abs(lam[0].real) / np.tan(np.pi / m):
            return a


def record_criterion(k, ok, detail):
    """Store and print one verdict line for acceptance criterion ``k``."""
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[k] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
