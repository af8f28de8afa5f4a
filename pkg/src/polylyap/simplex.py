"""Dense two-phase simplex returning an optimal basic feasible solution.

Problems are posed in standard form::

    max  c^T x   s.t.  A x = b,  x >= 0

The solver keeps the basis it terminates on, which downstream code uses
for implicit differentiation. Redundant equality rows are detected at the
end of phase 1 and dropped; the retained row indices are reported on the
solution so that any matrix built alongside ``A`` can be cut the same way.
"""
from dataclasses import dataclass, field

import numpy as np

import scipy.linalg

from . import _kernels
from .numerics import Singular, as_matrix, lu_factor, scale

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
DRIVE_OUT_TOL = 1e-7
NEG_TOL = 1e-6
HARRIS_TOL = 1e-11
BLAND_FACTOR = 10
PIVOT_LIMIT_FACTOR = 50
REINVERT_EVERY = 100
EQUILIBRATE_ROUNDS = 8


class LPError(Exception):
    pass


class Infeasible(LPError):
    pass


class Unbounded(LPError):
    pass


class PivotLimit(LPError):
    pass


class NumericalFailure(LPError):
    """Round-off left the solver on a singular or infeasible basis."""


@dataclass(frozen=True)
class StandardFormLP:
    a_hat: np.ndarray
    b_hat: np.ndarray
    c_hat: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a_hat, "a_hat")
        b = np.asarray(self.b_hat, dtype=float).reshape(-1)
        c = np.asarray(self.c_hat, dtype=float).reshape(-1)
        if b.shape[0] != a.shape[0] or c.shape[0] != a.shape[1]:
            raise ValueError(f"inconsistent LP shapes: A{a.shape}, b{b.shape}, c{c.shape}")
        object.__setattr__(self, "a_hat", a)
        object.__setattr__(self, "b_hat", b)
        object.__setattr__(self, "c_hat", c)

    @property
    def shape(self):
        return self.a_hat.shape


@dataclass(frozen=True)
class BasicSolution:
    """Optimal BFS. ``basis[i]`` is the column basic in retained row ``rows[i]``."""

    x_hat: np.ndarray
    basis: np.ndarray
    objective: float
    rows: np.ndarray
    dropped_rows: tuple = ()
    pivots: int = 0
    row_scale: np.ndarray = None
    col_scale: np.ndarray = None
    _lu: tuple = field(default=None, repr=False, compare=False)

    def basis_matrix(self, lp):
        return lp.a_hat[np.ix_(self.rows, self.basis)]

    def _scales(self):
        k = self.basis.shape[0]
        dr = np.ones(k) if self.row_scale is None else self.row_scale
        dc = np.ones(k) if self.col_scale is None else self.col_scale
        return dr, dc

    def basis_lu(self, lp):
        """LU factors of the equilibrated basis ``diag(dr) B diag(dc)``."""
        if self._lu is not None:
            return self._lu
        dr, dc = self._scales()
        return lu_factor(self.basis_matrix(lp) * dr[:, None] * dc[None, :])

    def basis_solve(self, lp, rhs):
        """Solve ``B y = rhs`` for the basis matrix ``B`` (rows of ``rhs`` are retained rows)."""
        dr, dc = self._scales()
        rhs = np.asarray(rhs, dtype=float)
        dr_b = dr.reshape((-1,) + (1,) * (rhs.ndim - 1))
        dc_b = dc.reshape((-1,) + (1,) * (rhs.ndim - 1))
        return dc_b * scipy.linalg.lu_solve(self.basis_lu(lp), dr_b * rhs, check_finite=False)

    def position(self):
        """Map column index -> row position in the basis (-1 when nonbasic)."""
        pos = np.full(self.x_hat.shape[0], -1, dtype=np.int64)
        pos[self.basis] = np.arange(self.basis.shape[0])
        return pos


def _crash_rows(a):
    """Rows that own a positive singleton column, mapped to that column."""
    k, l = a.shape
    owners = {}
    nz = a != 0.0
    counts = nz.sum(axis=0)
    for j in np.flatnonzero(counts == 1):
        i = int(np.flatnonzero(nz[:, j])[0])
        if a[i, j] > 0.0 and i not in owners:
            owners[i] = int(j)
    return owners


def _equilibrate(a, rounds=EQUILIBRATE_ROUNDS):
    """Ruiz scaling: ``dr[:, None] * a * dc`` has rows and columns of max ~1."""
    k, l = a.shape
    dr, dc = np.ones(k), np.ones(l)
    w = np.abs(a)
    for _ in range(rounds):
        rm = np.max(w, axis=1, initial=0.0)
        rm[rm == 0.0] = 1.0
        cm = np.max(w, axis=0, initial=0.0)
        cm[cm == 0.0] = 1.0
        fr, fc = 1.0 / np.sqrt(rm), 1.0 / np.sqrt(cm)
        dr *= fr
        dc *= fc
        w *= fr[:, None]
        w *= fc[None, :]
    return dr, dc


def _reinvert(a, b, cph, basis):
    """Fresh tableau ``(B^-1 A, B^-1 b, reduced costs)`` for ``basis``."""
    try:
        lu = lu_factor(a[:, basis])
    except Singular as exc:
        raise NumericalFailure(f"basis lost rank during pivoting: {exc}") from exc
    t = scipy.linalg.lu_solve(lu, a, check_finite=False)
    t[:, basis] = np.eye(basis.shape[0])
    rhs = scipy.linalg.lu_solve(lu, b, check_finite=False)
    cost = cph - cph[basis] @ t
    cost[basis] = 0.0
    return np.ascontiguousarray(t), rhs, cost


def _phase(a, b, cph, tab, basis, npiv, lim, tol_opt, art_start, stop_tol):
    """Pivot to optimality, refactorising from ``a`` every few pivots.

    Returns ``(status, npiv, tableau)``. A phase only ends on a tableau that
    was rebuilt from the original data, so accumulated round-off cannot fake
    optimality or unboundedness.
    """
    k, l = a.shape
    bland_after = BLAND_FACTOR * l
    allowed = np.ones(l, dtype=np.bool_)
    t, rhs, cost = tab
    while True:
        before = npiv
        status, npiv = _kernels.iterate(
            t, rhs, cost, basis, allowed, npiv, min(lim, npiv + REINVERT_EVERY), bland_after,
            tol_opt, PIVOT_TOL, HARRIS_TOL, art_start, stop_tol,
        )
        if status != _kernels.PIVOT_LIMIT and npiv == before:
            return status, npiv, (t, rhs, cost)
        if status == _kernels.PIVOT_LIMIT and npiv >= lim:
            return status, npiv, (t, rhs, cost)
        t, rhs, cost = _reinvert(a, b, cph, basis)


def solve(lp):
    """Solve ``lp`` and return an optimal :class:`BasicSolution`.

    Raises :class:`Infeasible`, :class:`Unbounded`, :class:`PivotLimit` or
    :class:`NumericalFailure`.
    """
    a0, b0, c0 = lp.a_hat, lp.b_hat, lp.c_hat
    k, l = a0.shape
    max_piv = PIVOT_LIMIT_FACTOR * max(l, 1)

    # Work on a = Dr A Dc with x = Dc x' and a non-negative right-hand side.
    dr, dc = _equilibrate(a0)
    dr = np.where(b0 < 0, -dr, dr)
    a = a0 * dr[:, None] * dc[None, :]
    rhs = b0 * dr
    c = c0 * dc
    tol_opt = OPT_TOL * max(1.0, float(np.max(np.abs(c), initial=0.0)))
    feas_tol = FEAS_TOL * (1.0 + float(np.max(np.abs(rhs), initial=0.0)))

    owners = _crash_rows(a)
    art_rows = np.array([i for i in range(k) if i not in owners], dtype=np.int64)
    na = art_rows.shape[0]
    a1 = np.zeros((k, l + na))
    a1[:, :l] = a
    a1[art_rows, l + np.arange(na)] = 1.0
    basis = np.empty(k, dtype=np.int64)
    basis[art_rows] = l + np.arange(na)
    for i, j in owners.items():
        basis[i] = j
    b1 = rhs.copy()

    npiv = 0
    if na:
        c1 = np.zeros(l + na)
        c1[l:] = -1.0
        tab = _reinvert(a1, b1, c1, basis)
        status, npiv, tab = _phase(a1, b1, c1, tab, basis, 0, max_piv, tol_opt, l, feas_tol)
        if status == _kernels.PIVOT_LIMIT:
            raise PivotLimit(f"phase 1 exceeded {max_piv} pivots")
        t, rhs, cost = tab
        infeas = float(np.sum(rhs[basis >= l]))
        if infeas > feas_tol:
            raise Infeasible(f"phase 1 residual {infeas:.3g}")

        keep = np.ones(k, dtype=bool)
        for r in range(k):
            if basis[r] < l:
                continue
            row = np.abs(t[r, :l])
            j = int(np.argmax(row)) if l else -1
            if l and row[j] > DRIVE_OUT_TOL:
                _kernels.pivot(t, rhs, cost, r, j)
                basis[r] = j
                npiv += 1
            else:
                keep[r] = False
    else:
        keep = np.ones(k, dtype=bool)

    rows = np.flatnonzero(keep)
    a2 = np.ascontiguousarray(a[rows])
    b2 = b1[rows]
    basis = np.ascontiguousarray(basis[rows])
    tab = _reinvert(a2, b2, c, basis)
    status, npiv, tab = _phase(a2, b2, c, tab, basis, npiv, max_piv, tol_opt, l, -1.0)
    if status == _kernels.UNBOUNDED:
        raise Unbounded("entering column has no blocking row")
    if status == _kernels.PIVOT_LIMIT:
        raise PivotLimit(f"exceeded {max_piv} pivots")

    # Basic values from the original data, factorised in scaled coordinates.
    lu = None
    x = np.zeros(l)
    dr_b, dc_b = dr[rows], dc[basis]
    if rows.size:
        try:
            lu = lu_factor(a0[np.ix_(rows, basis)] * dr_b[:, None] * dc_b[None, :])
        except Singular as exc:
            raise NumericalFailure(f"final basis is singular: {exc}") from exc
        x[basis] = dc_b * scipy.linalg.lu_solve(lu, dr_b * b0[rows], check_finite=False)
        if np.min(x) < -NEG_TOL * (1.0 + scale(x)):
            raise NumericalFailure(f"final basis is infeasible (min x = {np.min(x):.3g})")
    dropped = tuple(int(i) for i in np.flatnonzero(~keep))
    return BasicSolution(
        x_hat=x,
        basis=basis.copy(),
        objective=float(c0 @ x),
        rows=rows,
        dropped_rows=dropped,
        pivots=int(npiv),
        row_scale=dr_b,
        col_scale=dc_b,
        _lu=lu,
    )


def is_basic_feasible(lp, sol, tol=1e-8):
    """Check the BFS conditions on ``sol`` directly against ``lp``."""
    a, b = lp.a_hat, lp.b_hat
    x = sol.x_hat
    if np.max(np.abs(a @ x - b), initial=0.0) > tol * (1.0 + float(np.max(np.abs(b), initial=0.0))):
        return False
    if np.min(x, initial=0.0) < -FEAS_TOL * scale(x) * 10:
        return False
    if len(set(sol.basis.tolist())) != sol.basis.shape[0] or sol.basis.shape[0] != sol.rows.shape[0]:
        return False
    if sol.basis.shape[0] + len(sol.dropped_rows) != a.shape[0]:
        return False
    nonbasic = np.ones(x.shape[0], dtype=bool)
    nonbasic[sol.basis] = False
    if np.any(x[nonbasic] != 0.0):
        return False
    try:
        sol.basis_lu(lp)
    except Singular:
        return False
    return True


@dataclass(frozen=True)
class GeneralSolution:
    x: np.ndarray
    objective: float
    slack: np.ndarray
    basic: BasicSolution
    lp: StandardFormLP


def solve_with_inequalities(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, free=None):
    """Maximise ``c^T x`` subject to ``a_ub x <= b_ub``, ``a_eq x = b_eq``.

    Variables are non-negative unless flagged in ``free`` (a boolean mask or
    ``True`` for all). Free variables are split as ``x = x+ - x-`` and every
    inequality row gets a slack, after which :func:`solve` is called and the
    result is mapped back to the original variables.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    nv = c.shape[0]
    if free is None:
        free = np.zeros(nv, dtype=bool)
    elif free is True:
        free = np.ones(nv, dtype=bool)
    else:
        free = np.asarray(free, dtype=bool).reshape(-1)
    a_ub = np.zeros((0, nv)) if a_ub is None else as_matrix(a_ub, "a_ub").reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).reshape(-1)
    a_eq = np.zeros((0, nv)) if a_eq is None else as_matrix(a_eq, "a_eq").reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).reshape(-1)
    if a_ub.shape[0] != b_ub.shape[0] or a_eq.shape[0] != b_eq.shape[0]:
        raise ValueError("constraint matrix and right-hand side lengths differ")

    free_idx = np.flatnonzero(free)
    nf, nu, ne = free_idx.shape[0], a_ub.shape[0], a_eq.shape[0]
    ncol = nv + nf + nu
    a = np.zeros((nu + ne, ncol))
    a[:nu, :nv] = a_ub
    a[nu:, :nv] = a_eq
    a[:nu, nv:nv + nf] = -a_ub[:, free_idx]
    a[nu:, nv:nv + nf] = -a_eq[:, free_idx]
    a[:nu, nv + nf:] = np.eye(nu)
    cc = np.zeros(ncol)
    cc[:nv] = c
    cc[nv:nv + nf] = -c[free_idx]
    lp = StandardFormLP(a, np.concatenate([b_ub, b_eq]), cc)
    sol = solve(lp)
    x = sol.x_hat[:nv].copy()
    x[free_idx] -= sol.x_hat[nv:nv + nf]
    slack = sol.x_hat[nv + nf:].copy()
    return GeneralSolution(x=x, objective=float(c @ x), slack=slack, basic=sol, lp=lp)
