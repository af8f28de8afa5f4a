"""Contraction gap of a polytope and certificate checks.

A polytope ``V`` is contracting for ``xdot = A x`` with rate ``eta`` when a
Metzler ``M`` exists with ``A V = V M`` and ``1^T M = -eta 1^T``. The largest
such ``eta`` is the optimum of an LP; for polytopic hulls one ``M_i`` per
vertex matrix shares a single ``eta``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .numerics import scale
from .plants import as_model
from .polytope import VPolytope, check_absorbing, max_decays
from .sensitivity import DEFAULT_KAPPA, gap_standard_form
from .simplex import LPError, Unbounded, solve, solve_with_inequalities

EQ_TOL = 1e-8
METZLER_TOL = 1e-9
DECAY_TOL = 1e-6


@dataclass(frozen=True)
class ContractionCertificate:
    v: VPolytope
    m_list: tuple
    eta: float
    gain: np.ndarray = None

    @property
    def m(self):
        return self.m_list[0] if len(self.m_list) == 1 else None


@dataclass(frozen=True)
class GapSolution:
    """A solved gap LP together with what is needed to differentiate it."""

    certificate: ContractionCertificate
    lp: object
    layout: object
    basic: object
    a_list: list
    b_list: list
    c: np.ndarray


def solve_gap(v, plants, kappa=DEFAULT_KAPPA):
    model = as_model(plants)
    a_list, b_list = model.block_pairs()
    lp, lay = gap_standard_form(v, a_list, b_list, model.c, kappa)
    sol = solve(lp)
    eta, m_list, gain = lay.decode(sol.x_hat)
    cert = ContractionCertificate(v=v, m_list=tuple(m_list), eta=eta, gain=gain)
    return GapSolution(cert, lp, lay, sol, a_list, b_list, model.c)


def contraction_gap(v, plants, kappa=DEFAULT_KAPPA):
    """Largest shared contraction rate of ``v`` over all plant vertices.

    ``plants`` is a matrix, a list of matrices or a
    :class:`~polylyap.plants.PlantModel`; synthesis models also optimise the
    output-feedback gain inside the box ``|K_ij| <= kappa``.
    """
    return solve_gap(v, plants, kappa).certificate


def column_gap(v, a, i):
    """Best rate achievable for vertex ``i`` alone (``inf`` if unconstrained)."""
    vm = v.v
    free = np.zeros(v.m, dtype=bool)
    free[i] = True
    try:
        sol = solve_with_inequalities(-np.ones(v.m), a_eq=vm, b_eq=np.asarray(a) @ vm[:, i], free=free)
    except Unbounded:
        return math.inf
    return sol.objective


def _closed_loop(cert, plants):
    model = as_model(plants)
    if model.synthesis:
        return model.closed_loop(cert.gain)
    return model.closed_loop()


def certificate_residuals(cert, plants):
    """Worst violations of the rate, equality and Metzler conditions."""
    v = cert.v.v
    mats = _closed_loop(cert, plants)
    if len(mats) != len(cert.m_list):
        raise ValueError(f"{len(cert.m_list)} multipliers for {len(mats)} plant vertices")
    rate = eq = metz = 0.0
    for a, mb in zip(mats, cert.m_list):
        mb = np.asarray(mb)
        s = max(1.0, scale(mb))
        rate = max(rate, float(np.max(np.abs(mb.sum(axis=0) + cert.eta))) / s)
        s_eq = max(1.0, scale(a) * scale(v), scale(v) * scale(mb))
        eq = max(eq, float(np.max(np.abs(a @ v - v @ mb))) / s_eq)
        off = mb[~np.eye(mb.shape[0], dtype=bool)]
        if off.size:
            metz = max(metz, float(-np.min(off)))
    return rate, eq, metz


def verify_certificate(cert, plants):
    """Re-check a certificate against the plant without re-running any search."""
    if not np.isfinite(cert.eta) or not check_absorbing(cert.v):
        return False
    try:
        rate, eq, metz = certificate_residuals(cert, plants)
    except ValueError:
        return False
    return rate <= EQ_TOL and eq <= EQ_TOL and metz <= METZLER_TOL


def decay_margins(cert, plants, points):
    """For each point: ``(psi, [decay per vertex], min margin)`` with margin ``-eta psi - decay``."""
    mats = _closed_loop(cert, plants)
    out = []
    for x in np.atleast_2d(points):
        psi, decays = max_decays(cert.v, x, mats)
        out.append((psi, decays, min(-cert.eta * psi - d for d in decays)))
    return out


def sampled_decay_check(cert, plants, samples=1000, seed=0):
    """Check the Lyapunov decrease condition at random points on the unit sphere."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, cert.v.n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return all(margin >= -DECAY_TOL for _, _, margin in decay_margins(cert, plants, x))


def feasible_at_rate(v, plants, eta):
    """Whether the contraction conditions hold with the rate fixed to ``eta``."""
    model = as_model(plants)
    if model.synthesis:
        raise ValueError("fixed-rate feasibility is defined for analysis models only")
    vm = v.v
    m = vm.shape[1]
    for a in model.a:
        # Columns decouple once eta is fixed: V M_j = A V_j, 1^T M_j = -eta.
        for j in range(m):
            a_eq = np.vstack([vm, np.ones((1, m))])
            b_eq = np.concatenate([a @ vm[:, j], [-eta]])
            f = np.zeros(m, dtype=bool)
            f[j] = True
            try:
                solve_with_inequalities(np.zeros(m), a_eq=a_eq, b_eq=b_eq, free=f)
            except LPError:
                return False
    return True
