"""Standard form of the contraction-gap LP and derivatives of its optimum.

The gap LP for a polytope ``V`` and closed-loop blocks ``A_b (+ B_b K C)``
is written in standard form with the variable layout::

    x = [vec(P_1); -d_1; ...; vec(P_L); -d_L; eta+; eta-; vec(K+); vec(K-); s]

where ``M_b = P_b + d_b I``, ``eta = eta+ - eta-``, ``K = K+ - K-`` and
``s`` are the slacks of the gain box ``K+, K- <= kappa``. The gain and slack
columns only exist in synthesis mode. Rows come in blocks of ``n m``
equality rows (``V M_b - B_b K C V = A_b V``) followed by ``m`` rate rows
(``1^T M_b + eta 1^T = 0``), then the ``2 q r`` box rows.

With an optimal basis fixed, the basic variables solve ``B y = b(V)`` and
the implicit function theorem gives ``dy/dvec(V) = -B^-1 G``.
"""
from dataclasses import dataclass

import numpy as np

from .numerics import Singular, kron, lu_factor, unvec, vec
from .simplex import StandardFormLP

DEFAULT_KAPPA = 1e3


@dataclass(frozen=True)
class GapLayout:
    """Index bookkeeping for the stacked gap LP."""

    n: int
    m: int
    blocks: int
    q: int = 0
    r: int = 0
    kappa: float = DEFAULT_KAPPA

    @property
    def synthesis(self):
        return self.q * self.r > 0

    @property
    def block_cols(self):
        return self.m * self.m + 1

    def p_cols(self, b):
        start = b * self.block_cols
        return np.arange(start, start + self.m * self.m)

    def delta_col(self, b):
        return b * self.block_cols + self.m * self.m

    @property
    def eta_plus(self):
        return self.blocks * self.block_cols

    @property
    def eta_minus(self):
        return self.eta_plus + 1

    @property
    def gains(self):
        return self.q * self.r

    def k_plus_cols(self):
        return np.arange(self.eta_minus + 1, self.eta_minus + 1 + self.gains)

    def k_minus_cols(self):
        return self.k_plus_cols() + self.gains

    def slack_cols(self):
        start = self.eta_minus + 1 + 2 * self.gains
        return np.arange(start, start + 2 * self.gains)

    @property
    def num_cols(self):
        return self.blocks * self.block_cols + 2 + 4 * self.gains

    @property
    def block_rows(self):
        return self.n * self.m + self.m

    def eq_rows(self, b):
        start = b * self.block_rows
        return np.arange(start, start + self.n * self.m)

    def rate_rows(self, b):
        start = b * self.block_rows + self.n * self.m
        return np.arange(start, start + self.m)

    @property
    def num_rows(self):
        return self.blocks * self.block_rows + 2 * self.gains

    def labels(self):
        """Name of every column, used to check the index map is a bijection."""
        out = []
        for b in range(self.blocks):
            out += [("P", b, i, j) for j in range(self.m) for i in range(self.m)]
            out.append(("delta", b))
        out += [("eta+",), ("eta-",)]
        out += [("K+", i, j) for j in range(self.r) for i in range(self.q)]
        out += [("K-", i, j) for j in range(self.r) for i in range(self.q)]
        out += [("s", i) for i in range(2 * self.gains)]
        return out

    def decode(self, x):
        """Return ``(eta, [M_b], K or None)`` from a standard-form vector."""
        x = np.asarray(x, dtype=float)
        eta = float(x[self.eta_plus] - x[self.eta_minus])
        ms = []
        for b in range(self.blocks):
            p = unvec(x[self.p_cols(b)], self.m, self.m)
            ms.append(p - x[self.delta_col(b)] * np.eye(self.m))
        gain = None
        if self.synthesis:
            gain = unvec(x[self.k_plus_cols()] - x[self.k_minus_cols()], self.q, self.r)
        return eta, ms, gain

    def encode(self, eta, m_list, gain=None):
        """Inverse of :meth:`decode` using ``d = min(0, min diag M)``."""
        x = np.zeros(self.num_cols)
        for b, mb in enumerate(m_list):
            mb = np.asarray(mb, dtype=float)
            d = min(0.0, float(np.min(np.diag(mb))))
            x[self.p_cols(b)] = vec(mb - d * np.eye(self.m))
            x[self.delta_col(b)] = -d
        x[self.eta_plus] = max(eta, 0.0)
        x[self.eta_minus] = max(-eta, 0.0)
        if self.synthesis:
            kv = vec(gain)
            x[self.k_plus_cols()] = np.maximum(kv, 0.0)
            x[self.k_minus_cols()] = np.maximum(-kv, 0.0)
            x[self.slack_cols()] = self.kappa - np.concatenate(
                [x[self.k_plus_cols()], x[self.k_minus_cols()]]
            )
        return x


def _split_blocks(a_list, b_list):
    a_list = [np.asarray(a, dtype=float) for a in a_list]
    if b_list is None:
        return a_list, [None] * len(a_list)
    b_list = [np.asarray(b, dtype=float) for b in b_list]
    if len(b_list) != len(a_list):
        raise ValueError("need one input matrix per block")
    return a_list, b_list


def gap_standard_form(v, a_list, b_list=None, c=None, kappa=DEFAULT_KAPPA):
    """Standard-form gap LP for stacked blocks; returns ``(lp, layout)``.

    ``b_list``/``c`` switch on synthesis mode with a shared gain ``K``.
    """
    v = np.asarray(v.v if hasattr(v, "v") else v, dtype=float)
    n, m = v.shape
    a_list, b_list = _split_blocks(a_list, b_list)
    if c is not None:
        c = np.asarray(c, dtype=float)
        q, r = b_list[0].shape[1], c.shape[0]
    else:
        q = r = 0
    lay = GapLayout(n=n, m=m, blocks=len(a_list), q=q, r=r, kappa=float(kappa))

    a_hat = np.zeros((lay.num_rows, lay.num_cols))
    b_hat = np.zeros(lay.num_rows)
    c_hat = np.zeros(lay.num_cols)
    c_hat[lay.eta_plus] = 1.0
    c_hat[lay.eta_minus] = -1.0

    iv = kron(np.eye(m), v)
    ones_blk = kron(np.eye(m), np.ones((1, m)))
    vv = vec(v)
    for b, (ab, bb) in enumerate(zip(a_list, b_list)):
        er, rr, pc = lay.eq_rows(b), lay.rate_rows(b), lay.p_cols(b)
        a_hat[np.ix_(er, pc)] = iv
        a_hat[er, lay.delta_col(b)] = -vv
        b_hat[er] = vec(ab @ v)
        a_hat[np.ix_(rr, pc)] = ones_blk
        a_hat[rr, lay.delta_col(b)] = -1.0
        a_hat[rr, lay.eta_plus] = 1.0
        a_hat[rr, lay.eta_minus] = -1.0
        if lay.synthesis:
            gk = kron((c @ v).T, bb)
            a_hat[np.ix_(er, lay.k_plus_cols())] = -gk
            a_hat[np.ix_(er, lay.k_minus_cols())] = gk

    if lay.synthesis:
        box = np.arange(lay.blocks * lay.block_rows, lay.num_rows)
        kcols = np.concatenate([lay.k_plus_cols(), lay.k_minus_cols()])
        a_hat[box, kcols] = 1.0
        a_hat[box, lay.slack_cols()] = 1.0
        b_hat[box] = lay.kappa
    return StandardFormLP(a_hat, b_hat, c_hat), lay


def to_standard_form(v, a):
    """Standard-form gap LP for a single plant matrix."""
    return gap_standard_form(v, [a])[0]


def synthesis_standard_form(v, model, kappa=DEFAULT_KAPPA):
    """Standard-form synthesis gap LP for a :class:`~polylyap.plants.PlantModel`."""
    a_list, b_list = model.block_pairs()
    return gap_standard_form(v, a_list, b_list, model.c, kappa)[0]


def constraint_jacobian(lay, a_list, m_list, b_list=None, c=None, gain=None):
    """``G = d(A x - b)/d vec(V)`` at fixed ``x``."""
    n, m = lay.n, lay.m
    a_list, b_list = _split_blocks(a_list, b_list)
    g = np.zeros((lay.num_rows, n * m))
    for b, (ab, mb) in enumerate(zip(a_list, m_list)):
        acl = ab if gain is None else ab + b_list[b] @ gain @ c
        g[lay.eq_rows(b)] = kron(np.asarray(mb).T, np.eye(n)) - kron(np.eye(m), acl)
    return g


@dataclass(frozen=True)
class GapDerivatives:
    """First-order response of the optimal gap LP solution to ``V -> V + dV``.

    ``d_eta`` is an n x m array: the change in rate is ``sum(d_eta * dV)``.
    ``d_m[b]`` is an (m*m) x (n*m) Jacobian of ``vec(M_b)`` with respect to
    ``vec(V)``; only off-diagonal rows are populated.
    """

    d_eta: np.ndarray
    d_m: np.ndarray
    basis: np.ndarray

    def eta_change(self, dv):
        return float(np.sum(self.d_eta * dv))

    def m_change(self, dv):
        m = int(round(np.sqrt(self.d_m.shape[1])))
        return [unvec(jb @ vec(dv), m, m) for jb in self.d_m]


def basic_jacobian(lp, sol, g):
    """``-B^-1 G`` restricted to the rows kept by the solver."""
    try:
        return -sol.basis_solve(lp, g[sol.rows])
    except Singular as exc:
        raise Singular(f"degenerate basis: {exc}") from exc


def gap_derivatives(v, a, sol, lp=None, layout=None, b_list=None, c=None):
    """Derivatives of the optimal rate and off-diagonal of ``M`` w.r.t. ``V``.

    ``a`` is a single matrix or a list of block matrices. ``sol`` must be an
    optimal BFS of the corresponding gap LP. Raises :class:`Singular` when
    the basis matrix cannot be factorised.
    """
    a_list = [a] if np.ndim(a) == 2 else list(a)
    if lp is None or layout is None:
        lp, layout = gap_standard_form(v, a_list, b_list, c, kappa=layout.kappa if layout else DEFAULT_KAPPA)
    _, m_list, gain = layout.decode(sol.x_hat)
    g = constraint_jacobian(layout, a_list, m_list, b_list, c, gain)
    jac = basic_jacobian(lp, sol, g)
    pos = sol.position()

    def row(col):
        return jac[pos[col]] if pos[col] >= 0 else np.zeros(jac.shape[1])

    n, m = layout.n, layout.m
    d_eta = unvec(row(layout.eta_plus) - row(layout.eta_minus), n, m)
    d_m = np.zeros((layout.blocks, m * m, n * m))
    for b in range(layout.blocks):
        cols = layout.p_cols(b)
        for j in range(m):
            for i in range(m):
                if i != j:
                    d_m[b, j * m + i] = row(cols[j * m + i])
    return GapDerivatives(d_eta=d_eta, d_m=d_m, basis=sol.basis.copy())
