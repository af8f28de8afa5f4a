"""Vertex-represented polytopes and their gauge (Minkowski) functional."""
from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix
from .simplex import Infeasible, StandardFormLP, solve, solve_with_inequalities

MAX_INIT_RETRIES = 100
SUPPORT_TOL = 1e-12


class DegenerateSample(RuntimeError):
    pass


@dataclass(frozen=True)
class VPolytope:
    """Convex hull of the columns of ``v`` (n x m)."""

    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", as_matrix(self.v, "V"))
        self.v.setflags(write=False)

    @property
    def n(self):
        return self.v.shape[0]

    @property
    def m(self):
        return self.v.shape[1]


def check_absorbing(p):
    """True when the origin lies in the interior of the hull.

    The columns must positively span the space: ``V`` has full row rank and
    ``{q : V q = 0, q >= 1}`` is non-empty.
    """
    v = p.v
    n, m = v.shape
    if m < n + 1 or np.linalg.matrix_rank(v) < n:
        return False
    # q = 1 + s with s >= 0
    lp = StandardFormLP(v, -v.sum(axis=1), np.zeros(m))
    try:
        solve(lp)
    except Infeasible:
        return False
    return True


def minkowski_primal(p, x):
    """Gauge value ``min{1^T q : V q = x, q >= 0}``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.any(x):
        return 0.0
    sol = solve(StandardFormLP(p.v, x, -np.ones(p.m)))
    return -sol.objective


def minkowski_dual(p, x):
    """Gauge value via ``max{h^T x : h^T V <= 1^T}``; returns ``(value, h)``.

    The maximiser ``h`` is a subgradient of the gauge at ``x``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    sol = solve_with_inequalities(x, a_ub=p.v.T, b_ub=np.ones(p.m), free=True)
    return sol.objective, sol.x


def max_decays(p, x, mats):
    """Gauge value and ``sup h^T A x`` over the subdifferential, for each ``A``.

    By complementary slackness the subdifferential at ``x`` is
    ``{h : h^T V <= 1, h^T v_j = 1 for j in supp(q)}`` for any optimal ``q``
    of the primal gauge LP, which avoids a tolerance on ``h^T x = psi``.
    Returns ``(psi, [decay per matrix])``.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.any(x):
        return 0.0, [0.0] * len(mats)
    v = p.v
    sol = solve(StandardFormLP(v, x, -np.ones(p.m)))
    q = sol.x_hat
    psi = float(q.sum())
    supp = q > SUPPORT_TOL * max(psi, 1.0)
    out = []
    for a in mats:
        a = as_matrix(a, "A")
        try:
            res = solve_with_inequalities(
                a @ x, a_ub=v[:, ~supp].T, b_ub=np.ones(int((~supp).sum())),
                a_eq=v[:, supp].T, b_eq=np.ones(int(supp.sum())), free=True,
            )
        except Infeasible:
            # Support picked up round-off; fall back to a relaxed face.
            slack = 1e-9 * abs(psi) + 1e-12
            res = solve_with_inequalities(
                a @ x, a_ub=np.vstack([v.T, -x[None, :]]),
                b_ub=np.concatenate([np.ones(p.m), [-psi + slack]]), free=True,
            )
        out.append(res.objective)
    return psi, out


def subgradient_max_decay(p, a, x):
    """``sup h^T A x`` over the subdifferential of the gauge at ``x``.

    This is the upper Dini derivative of the gauge along ``xdot = A x``.
    """
    return max_decays(p, x, [a])[1][0]


def random_init(n, m, seed=0):
    """Random polytope with ``m`` unit-length vertices containing the origin.

    ``m - 1`` Gaussian directions are normalised and the last vertex is the
    normalised negative of their sum. A draw failing the interior check is
    retried with ``seed + 1``, up to ``MAX_INIT_RETRIES`` times.
    """
    if m < n + 1:
        raise ValueError(f"need at least n + 1 = {n + 1} vertices, got {m}")
    for attempt in range(MAX_INIT_RETRIES):
        rng = np.random.default_rng(seed + attempt)
        w = rng.standard_normal((n, m - 1))
        w /= np.linalg.norm(w, axis=0)
        last = -w.sum(axis=1)
        norm = np.linalg.norm(last)
        if norm < 1e-8:
            continue
        p = VPolytope(np.column_stack([w, last / norm]))
        if check_absorbing(p):
            return p
    raise DegenerateSample(f"{MAX_INIT_RETRIES} draws failed the interior check (n={n}, m={m})")
