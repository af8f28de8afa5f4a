"""Hot simplex pivoting loops.

Two implementations with identical selection rules are kept: an explicit
loop version compiled by numba and a vectorised numpy version used when
numba is disabled (see :mod:`polylyap._backend`).

Tableau conventions: ``t`` is the k x l constraint block in the current
basis (B^-1 A), ``rhs`` is B^-1 b, ``cost`` holds reduced costs for a
maximisation problem and ``basis[i]`` is the column basic in row ``i``.
All arrays are updated in place.

Status codes returned by ``iterate``: 0 optimal, 1 unbounded, 2 pivot limit.
With ``stop_tol >= 0`` the loop also stops as optimal once the basic
columns numbered ``art_start`` and above sum to at most ``stop_tol``
(phase 1 reaching zero infeasibility on a degenerate vertex).
"""
import numpy as np

from ._backend import USE_NUMBA

OPTIMAL = 0
UNBOUNDED = 1
PIVOT_LIMIT = 2

_TIE = 1e-12


def _iterate_py(t, rhs, cost, basis, allowed, npiv, max_piv, bland_after, tol_opt, tol_piv, tol_feas, art_start, stop_tol):
    k, l = t.shape
    while True:
        if stop_tol >= 0.0:
            infeas = 0.0
            for i in range(k):
                if basis[i] >= art_start:
                    infeas += rhs[i]
            if infeas <= stop_tol:
                return OPTIMAL, npiv
        bland = npiv >= bland_after
        enter = -1
        best = tol_opt
        for j in range(l):
            if allowed[j] and cost[j] > tol_opt:
                if bland:
                    enter = j
                    break
                if cost[j] > best:
                    best = cost[j]
                    enter = j
        if enter < 0:
            return OPTIMAL, npiv
        if npiv >= max_piv:
            return PIVOT_LIMIT, npiv

        leave = -1
        if bland:
            # Exact min-ratio, smallest basic index on ties (anti-cycling).
            rmin = np.inf
            for i in range(k):
                a = t[i, enter]
                if a > tol_piv:
                    r = max(rhs[i], 0.0) / a
                    if leave < 0 or r < rmin - _TIE * (1.0 + abs(rmin)):
                        rmin = r
                        leave = i
                    elif r <= rmin + _TIE * (1.0 + abs(rmin)) and basis[i] < basis[leave]:
                        leave = i
        else:
            # Harris two-pass: bound the step with relaxed bounds, then take
            # the largest pivot among rows within that bound.
            theta = np.inf
            for i in range(k):
                a = t[i, enter]
                if a > tol_piv:
                    r = (max(rhs[i], 0.0) + tol_feas) / a
                    if r < theta:
                        theta = r
            pbest = 0.0
            for i in range(k):
                a = t[i, enter]
                if a > tol_piv and max(rhs[i], 0.0) / a <= theta and a > pbest:
                    pbest = a
                    leave = i
        if leave < 0:
            return UNBOUNDED, npiv

        pivot(t, rhs, cost, leave, enter)
        basis[leave] = enter
        npiv += 1


def _pivot_py(t, rhs, cost, r, j):
    k, l = t.shape
    inv = 1.0 / t[r, j]
    for q in range(l):
        t[r, q] *= inv
    rhs[r] *= inv
    t[r, j] = 1.0
    for i in range(k):
        if i == r:
            continue
        f = t[i, j]
        if f != 0.0:
            for q in range(l):
                t[i, q] -= f * t[r, q]
            rhs[i] -= f * rhs[r]
            t[i, j] = 0.0
    f = cost[j]
    if f != 0.0:
        for q in range(l):
            cost[q] -= f * t[r, q]
        cost[j] = 0.0


def _iterate_np(t, rhs, cost, basis, allowed, npiv, max_piv, bland_after, tol_opt, tol_piv, tol_feas, art_start, stop_tol):
    while True:
        if stop_tol >= 0.0 and rhs[basis >= art_start].sum() <= stop_tol:
            return OPTIMAL, npiv
        bland = npiv >= bland_after
        cand = allowed & (cost > tol_opt)
        if not cand.any():
            return OPTIMAL, npiv
        if npiv >= max_piv:
            return PIVOT_LIMIT, npiv
        if bland:
            enter = int(np.argmax(cand))
        else:
            enter = int(np.argmax(np.where(cand, cost, -np.inf)))

        col = t[:, enter]
        pos = col > tol_piv
        if not pos.any():
            return UNBOUNDED, npiv
        base = np.maximum(rhs[pos], 0.0)
        rows = np.flatnonzero(pos)
        if bland:
            ratios = base / col[pos]
            rmin = ratios.min()
            ties = rows[ratios <= rmin + _TIE * (1.0 + abs(rmin))]
            leave = int(ties[np.argmin(basis[ties])])
        else:
            theta = ((base + tol_feas) / col[pos]).min()
            ok = rows[base / col[pos] <= theta]
            leave = int(ok[np.argmax(col[ok])])

        pivot(t, rhs, cost, leave, enter)
        basis[leave] = enter
        npiv += 1


def _pivot_np(t, rhs, cost, r, j):
    p = t[r, j]
    t[r] /= p
    rhs[r] /= p
    t[r, j] = 1.0
    f = t[:, j].copy()
    f[r] = 0.0
    t -= np.outer(f, t[r])
    rhs -= f * rhs[r]
    t[:, j] = 0.0
    t[r, j] = 1.0
    cj = cost[j]
    if cj != 0.0:
        cost -= cj * t[r]
        cost[j] = 0.0


if USE_NUMBA:
    from numba import njit

    pivot = njit(cache=True)(_pivot_py)
    iterate = njit(cache=True)(_iterate_py)
else:
    pivot = _pivot_np
    iterate = _iterate_np
