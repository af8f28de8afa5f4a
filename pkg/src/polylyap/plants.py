"""Plant models: single matrices, polytopic hulls and synthesis tuples."""
import itertools
from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix

MAX_UNCERTAIN = 20

# DC motor nominal parameters (inertia, friction, emf, resistance, inductance).
J0, B0, K0, R0, L0 = 0.01, 0.1, 0.01, 1.0, 0.5


class TooManyCorners(ValueError):
    pass


@dataclass(frozen=True)
class PlantModel:
    """``kind`` is ``single``, ``hull`` or ``synthesis``.

    For synthesis models ``a`` and ``b`` are the vertex lists of the state
    and input matrix hulls and ``c`` the output matrix; closed-loop blocks
    are every pair ``(A_i, B_j)``.
    """

    kind: str
    a: tuple
    b: tuple = None
    c: np.ndarray = None

    def __post_init__(self):
        if self.kind not in ("single", "hull", "synthesis"):
            raise ValueError(f"unknown plant kind {self.kind!r}")
        a = tuple(as_matrix(x, "A") for x in self.a)
        if not a:
            raise ValueError("plant needs at least one state matrix")
        n = a[0].shape[0]
        for x in a:
            if x.shape != (n, n):
                raise ValueError(f"state matrices must all be {n}x{n}, got {x.shape}")
        if self.kind == "single" and len(a) != 1:
            raise ValueError("single plant takes exactly one matrix")
        object.__setattr__(self, "a", a)
        if self.kind == "synthesis":
            if self.b is None or self.c is None:
                raise ValueError("synthesis plant needs B and C")
            b = tuple(as_matrix(x, "B") for x in self.b)
            if not b:
                raise ValueError("synthesis plant needs at least one input matrix")
            q = b[0].shape[1]
            for x in b:
                if x.shape != (n, q):
                    raise ValueError(f"input matrices must all be {n}x{q}, got {x.shape}")
            c = as_matrix(self.c, "C")
            if c.shape[1] != n:
                raise ValueError(f"C must have {n} columns, got {c.shape}")
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "c", c)
        else:
            object.__setattr__(self, "b", None)
            object.__setattr__(self, "c", None)

    @property
    def n(self):
        return self.a[0].shape[0]

    @property
    def synthesis(self):
        return self.kind == "synthesis"

    def block_pairs(self):
        """``(a_list, b_list)`` over all hull pairs; ``b_list`` is None for analysis."""
        if not self.synthesis:
            return list(self.a), None
        pairs = list(itertools.product(self.a, self.b))
        return [p[0] for p in pairs], [p[1] for p in pairs]

    def closed_loop(self, gain=None):
        """Closed-loop vertex matrices ``A_i + B_j K C``."""
        a_list, b_list = self.block_pairs()
        if b_list is None:
            return a_list
        if gain is None:
            raise ValueError("synthesis plant needs a gain to close the loop")
        gain = np.asarray(gain, dtype=float)
        return [a + b @ gain @ self.c for a, b in zip(a_list, b_list)]

    def with_gain(self, gain):
        """Hull model of the closed loop under a fixed gain."""
        return hull(self.closed_loop(gain))


def single(a):
    return PlantModel("single", (a,))


def hull(a_list):
    return PlantModel("hull", tuple(a_list))


def synthesis(a_list, b_list, c):
    return PlantModel("synthesis", tuple(a_list), tuple(b_list), c)


def as_model(plants):
    """Coerce a matrix, a list of matrices or a model to a :class:`PlantModel`."""
    if isinstance(plants, PlantModel):
        return plants
    if np.ndim(plants) == 2:
        return single(plants)
    plants = list(plants)
    return single(plants[0]) if len(plants) == 1 else hull(plants)


@dataclass(frozen=True)
class IntervalMatrix:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = as_matrix(self.lower, "lower"), as_matrix(self.upper, "upper")
        if lo.shape != hi.shape:
            raise ValueError("interval bounds differ in shape")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)


def corners(im):
    """All corner matrices of an interval matrix.

    Uncertain entries are enumerated in column-major order and the corner
    list follows binary counting over them (entry 0 is the least
    significant bit, 0 = lower bound).
    """
    lo, hi = im.lower, im.upper
    unc = [(i, j) for j in range(lo.shape[1]) for i in range(lo.shape[0]) if lo[i, j] < hi[i, j]]
    if len(unc) > MAX_UNCERTAIN:
        raise TooManyCorners(f"{len(unc)} uncertain entries (limit {MAX_UNCERTAIN})")
    out = []
    for code in range(2 ** len(unc)):
        a = lo.copy()
        for bit, (i, j) in enumerate(unc):
            if code >> bit & 1:
                a[i, j] = hi[i, j]
        out.append(a)
    return out


def _ratio(num, den):
    """Range of ``num / den`` for positive intervals."""
    return num[0] / den[1], num[1] / den[0]


def _box(nominal, gamma):
    return nominal / gamma, nominal * gamma


def speed_interval(gamma_s):
    if gamma_s < 1:
        raise ValueError("gamma must be >= 1")
    j, b, k = _box(J0, gamma_s), _box(B0, gamma_s), _box(K0, gamma_s)
    lo_bj, hi_bj = _ratio(b, j)
    lo_kj, hi_kj = _ratio(k, j)
    lo_kl, hi_kl = k[0] / L0, k[1] / L0
    lower = np.array([[-hi_bj, lo_kj], [-hi_kl, -R0 / L0]])
    upper = np.array([[-lo_bj, hi_kj], [-lo_kl, -R0 / L0]])
    return IntervalMatrix(lower, upper)


def _speed_matrix(j, b, k):
    return np.array([[-b / j, k / j], [-k / L0, -R0 / L0]])


def speed_parameter_corners(gamma_s):
    """Speed matrices at the 8 corners of the physical ``(J, b, K)`` box.

    Their hull is tighter than the interval hull but does not contain every
    matrix the parameter box generates, since the entries are not affine in
    the parameters.
    """
    if gamma_s < 1:
        raise ValueError("gamma must be >= 1")
    boxes = [_box(J0, gamma_s), _box(B0, gamma_s), _box(K0, gamma_s)]
    return [_speed_matrix(j, b, k) for j, b, k in itertools.product(*boxes)]


def motor_speed_model(gamma_s, hull_kind="interval"):
    """Corner hull of the DC motor speed dynamics under the parameter box.

    ``hull_kind="interval"`` (default) bounds each matrix entry separately and
    covers every parameter value; ``"parameter"`` uses the physical corners.
    """
    if hull_kind == "interval":
        mats = corners(speed_interval(gamma_s))
    elif hull_kind == "parameter":
        mats = speed_parameter_corners(gamma_s)
        if gamma_s == 1:
            mats = mats[:1]
    else:
        raise ValueError(f"unknown hull kind {hull_kind!r}")
    return single(mats[0]) if len(mats) == 1 else hull(mats)


def position_interval(gamma_p):
    if gamma_p < 1:
        raise ValueError("gamma must be >= 1")
    j, k = _box(J0, gamma_p), _box(K0, gamma_p)
    lo_bj, hi_bj = B0 / j[1], B0 / j[0]
    lo_kj, hi_kj = _ratio(k, j)
    lo_kl, hi_kl = k[0] / L0, k[1] / L0
    lower = np.array([[0.0, 1.0, 0.0], [0.0, -hi_bj, lo_kj], [0.0, -hi_kl, -R0 / L0]])
    upper = np.array([[0.0, 1.0, 0.0], [0.0, -lo_bj, hi_kj], [0.0, -lo_kl, -R0 / L0]])
    return IntervalMatrix(lower, upper)


POSITION_B = np.array([[0.0], [0.0], [1.0 / L0]])
POSITION_C = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


def motor_position_model(gamma_p):
    """Output-feedback synthesis model for the DC motor position dynamics."""
    return synthesis(corners(position_interval(gamma_p)), [POSITION_B], POSITION_C)
