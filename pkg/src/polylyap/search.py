"""Iterative search for a contracting polytope with a fixed number of vertices.

Each iteration solves the gap LP at the current vertex matrix. If the rate
is not yet positive, a second LP proposes a small vertex perturbation that
increases it, either from the linearised constraint manifold (``full``) or
from the derivative of the optimal rate under the current basis (``fast``).
Perturbations that lower the rate or lose the interior condition are
rejected and retried with a smaller budget.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .contraction import solve_gap, verify_certificate
from .numerics import Singular, kron, scale, unvec, vec
from .plants import as_model
from .polytope import VPolytope, check_absorbing, random_init
from .sensitivity import DEFAULT_KAPPA, gap_derivatives
from .simplex import LPError, solve_with_inequalities

log = logging.getLogger(__name__)

CERTIFIED = "Certified"
MAX_ITER = "MaxIter"
STALLED = "Stalled"

MAX_SHRINKS = 30
DECREASE_TOL = 1e-12


@dataclass(frozen=True)
class SearchConfig:
    m: int
    max_iter: int = 500
    epsilon0: float = 0.05
    eps_shrink: float = 0.5
    eps_grow: float = 1.5
    eta_tol: float = 1e-7
    seed: int = 0
    step_mode: str = "fast"
    restarts: int = 10
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        if self.epsilon0 <= 0:
            raise ValueError("epsilon0 must be positive")
        if self.eta_tol < 0:
            raise ValueError("eta_tol must be non-negative")
        if not 0 < self.eps_shrink < 1 or self.eps_grow < 1:
            raise ValueError("need 0 < eps_shrink < 1 <= eps_grow")
        if self.step_mode not in ("fast", "full"):
            raise ValueError(f"unknown step mode {self.step_mode!r}")

    def restart_seed(self, r):
        # Spaced apart so retries inside random_init never collide.
        return self.seed + 1000 * r


@dataclass(frozen=True)
class TraceEntry:
    restart: int
    iteration: int
    eta: float
    eps: float
    step_norm: float
    basis_changed: bool


@dataclass
class SearchReport:
    status: str
    certificate: object = None
    trace: list = field(default_factory=list)
    restart: int = -1
    iterations: int = 0

    @property
    def certified(self):
        return self.status == CERTIFIED


def _ell1_split(n):
    """Columns ``[u, w]`` with ``x = u - w`` and a budget row ``sum(u + w)``."""
    return np.hstack([np.eye(n), -np.eye(n)]), np.ones(2 * n)


def step_full(v, cert, eps, plants, kappa=DEFAULT_KAPPA, eps_gain=None, eps_m=None):
    """Maximise the first-order rate change over ``(dV, dM_i, dK)``.

    Returns ``(dV, [dM_i], d_eta, dK or None)``. Norm budgets are entrywise
    l1 sums; each block's ``dM_i`` has its own budget, ``eps`` scaled by the
    size of ``M_i`` unless ``eps_m`` is given.
    """
    model = as_model(plants)
    vm = v.v
    n, m = vm.shape
    a_list, b_list = model.block_pairs()
    nb = len(a_list)
    gain = cert.gain
    g = gain.size if gain is not None else 0
    mm, nm = m * m, n * m
    if eps_gain is None:
        eps_gain = eps * max(1.0, scale(gain) if g else 1.0)

    # z = [d_eta | uM wM (per block) | uV wV | uK wK]
    o_m = 1
    o_v = o_m + 2 * nb * mm
    o_k = o_v + 2 * nm
    nz = o_k + 2 * g
    free = np.zeros(nz, dtype=bool)
    free[0] = True

    def dm_cols(b):
        return o_m + 2 * mm * b

    eq_rows, ub_rows, ub_rhs = [], [], []
    sel_m = kron(np.eye(m), np.ones((1, m)))
    iv = kron(np.eye(m), vm)
    offdiag = ~np.eye(m, dtype=bool).reshape(-1, order="F")
    for b in range(nb):
        mb = np.asarray(cert.m_list[b])
        acl = a_list[b] if gain is None else a_list[b] + b_list[b] @ gain @ model.c
        c0 = dm_cols(b)
        rate = np.zeros((m, nz))
        rate[:, 0] = 1.0
        rate[:, c0:c0 + mm] = sel_m
        rate[:, c0 + mm:c0 + 2 * mm] = -sel_m
        eq_rows.append(rate)

        dyn = np.zeros((nm, nz))
        jv = kron(np.eye(m), acl) - kron(mb.T, np.eye(n))
        dyn[:, o_v:o_v + nm] = jv
        dyn[:, o_v + nm:o_v + 2 * nm] = -jv
        dyn[:, c0:c0 + mm] = -iv
        dyn[:, c0 + mm:c0 + 2 * mm] = iv
        if g:
            jk = kron((model.c @ vm).T, b_list[b])
            dyn[:, o_k:o_k + g] = jk
            dyn[:, o_k + g:o_k + 2 * g] = -jk
        eq_rows.append(dyn)

        # M + dM stays Metzler.
        idx = np.flatnonzero(offdiag)
        met = np.zeros((idx.size, nz))
        met[np.arange(idx.size), c0 + idx] = -1.0
        met[np.arange(idx.size), c0 + mm + idx] = 1.0
        ub_rows.append(met)
        ub_rhs.append(vec(mb)[idx])

        bud = np.zeros((1, nz))
        bud[0, c0:c0 + 2 * mm] = 1.0
        ub_rows.append(bud)
        ub_rhs.append([eps * max(1.0, scale(mb)) if eps_m is None else eps_m])

    bud = np.zeros((1, nz))
    bud[0, o_v:o_v + 2 * nm] = 1.0
    ub_rows.append(bud)
    ub_rhs.append([eps])
    if g:
        bud = np.zeros((1, nz))
        bud[0, o_k:o_k + 2 * g] = 1.0
        ub_rows.append(bud)
        ub_rhs.append([eps_gain])
        kv = vec(gain)
        box = np.zeros((2 * g, nz))
        box[:g, o_k:o_k + g] = np.eye(g)
        box[:g, o_k + g:o_k + 2 * g] = -np.eye(g)
        box[g:] = -box[:g]
        ub_rows.append(box)
        ub_rhs.append(np.concatenate([kappa - kv, kappa + kv]))

    a_eq = np.vstack(eq_rows)
    c = np.zeros(nz)
    c[0] = 1.0
    sol = solve_with_inequalities(
        c, a_ub=np.vstack(ub_rows), b_ub=np.concatenate(ub_rhs), a_eq=a_eq, b_eq=np.zeros(a_eq.shape[0]), free=free
    )
    z = sol.x
    dv = unvec(z[o_v:o_v + nm] - z[o_v + nm:o_v + 2 * nm], n, m)
    dms = [unvec(z[dm_cols(b):dm_cols(b) + mm] - z[dm_cols(b) + mm:dm_cols(b) + 2 * mm], m, m) for b in range(nb)]
    dk = unvec(z[o_k:o_k + g] - z[o_k + g:o_k + 2 * g], *gain.shape) if g else None
    return dv, dms, float(z[0]), dk


def step_fast(v, cert, der, eps):
    """Maximise the predicted rate change ``<d_eta, dV>`` with ``|dV|_1 <= eps``.

    Off-diagonal entries of each ``M_i`` are kept non-negative to first
    order. Returns zero when the rate has no sensitivity.
    """
    n, m = v.v.shape
    nm = n * m
    d = vec(der.d_eta)
    if eps <= 0 or not np.any(d):
        return np.zeros((n, m))
    split, budget = _ell1_split(nm)
    rows, rhs = [budget[None, :]], [[eps]]
    for b, jb in enumerate(der.d_m):
        live = np.flatnonzero(np.any(jb != 0.0, axis=1))
        if live.size:
            rows.append(-jb[live] @ split)
            rhs.append(vec(cert.m_list[b])[live])
    sol = solve_with_inequalities(d @ split, a_ub=np.vstack(rows), b_ub=np.concatenate(rhs))
    if sol.objective <= 0.0:
        return np.zeros((n, m))
    return unvec(split @ sol.x, n, m)


def _propose(gs, v, eps, cfg, model):
    if cfg.step_mode == "fast":
        try:
            der = gap_derivatives(v, gs.a_list, gs.basic, gs.lp, gs.layout, gs.b_list, gs.c)
            dv = step_fast(v, gs.certificate, der, eps)
        except Singular:
            dv = None
        if dv is not None and np.any(dv):
            return dv
        # Degenerate basis: the fixed-basis model sees no ascent direction.
    return step_full(v, gs.certificate, eps, model, cfg.kappa)[0]


def _run(model, cfg, r, report):
    n = model.n
    v = random_init(n, cfg.m, cfg.restart_seed(r))
    gs = solve_gap(v, model, cfg.kappa)
    eps = cfg.epsilon0
    basis_changed = False
    step_norm = 0.0
    for it in range(cfg.max_iter + 1):
        eta = gs.certificate.eta
        report.trace.append(TraceEntry(r, it, eta, eps, step_norm, basis_changed))
        report.iterations += 1
        if eta > cfg.eta_tol and verify_certificate(gs.certificate, model):
            return CERTIFIED, gs.certificate
        if it == cfg.max_iter:
            return MAX_ITER, None

        accepted = None
        for _ in range(MAX_SHRINKS):
            try:
                dv = _propose(gs, v, eps, cfg, model)
            except (Singular, LPError) as exc:
                log.debug("restart %d iter %d: step failed (%s)", r, it, exc)
                return STALLED, None
            if not np.any(dv):
                log.debug("restart %d iter %d: zero step", r, it)
                return STALLED, None
            cand = v.v + dv
            cand = VPolytope(cand / scale(cand))
            if check_absorbing(cand):
                try:
                    new = solve_gap(cand, model, cfg.kappa)
                except LPError:
                    new = None
                if new is not None and new.certificate.eta >= eta - DECREASE_TOL:
                    accepted = (cand, new, float(np.abs(dv).sum()))
                    break
            eps *= cfg.eps_shrink
        if accepted is None:
            log.debug("restart %d iter %d: no improving step after %d shrinks", r, it, MAX_SHRINKS)
            return STALLED, None
        v, new, step_norm = accepted
        basis_changed = not np.array_equal(np.sort(new.basic.basis), np.sort(gs.basic.basis))
        gs = new
        eps = min(eps * cfg.eps_grow, cfg.epsilon0)
    return MAX_ITER, None


def _search(model, cfg):
    if cfg.m < model.n + 1:
        raise ValueError(f"need at least n + 1 = {model.n + 1} vertices")
    report = SearchReport(status=MAX_ITER)
    statuses = []
    for r in range(max(cfg.restarts, 1)):
        status, cert = _run(model, cfg, r, report)
        log.info("restart %d: %s", r, status)
        statuses.append(status)
        if status == CERTIFIED:
            report.status, report.certificate, report.restart = status, cert, r
            return report
    report.status = MAX_ITER if MAX_ITER in statuses else STALLED
    return report


def find_polyhedron(plants, cfg):
    """Search for a contracting polytope for a single plant or a hull."""
    model = as_model(plants)
    if model.synthesis:
        raise ValueError("use synthesize() for synthesis models")
    return _search(model, cfg)


def synthesize(model, cfg):
    """Search jointly for a polytope and an output-feedback gain."""
    model = as_model(model)
    if not model.synthesis:
        raise ValueError("synthesize() needs a synthesis model")
    return _search(model, cfg)
