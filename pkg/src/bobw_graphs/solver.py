"""FTRL subproblem solvers over the probability simplex.

Every regularizer handled here is separable, ``psi(p) = sum_i f_i(p_i)``, with
one of three per-coordinate terms:

* ``ShannonFull(w)``:  ``f(x) = w * x ln x`` (full negative entropy),
* ``ShannonPair(w)``:  ``f(x) = w * (x ln x + (1-x) ln(1-x))``,
* ``RootPair(w)``:     ``f(x) = -2 w (sqrt(x) + sqrt(1-x))``.

``argmin_p <L, p> + psi(p)`` is found from the stationarity condition
``f_i'(x_i) + L_i + lam = 0``.  Each ``x_i(lam)`` is strictly decreasing, so
the multiplier is located by a safeguarded Newton iteration on
``sum_i x_i(lam) = 1`` inside an exact bracket.  The hot loops are compiled
with numba.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numba
import numpy as np

from .errors import BadParameterError, BoundaryPointError, NoConvergenceError, NonFiniteError

SHANNON_FULL = 0
SHANNON_PAIR = 1
ROOT_PAIR = 2

# coordinates are kept in [CLAMP_LO, 1 - CLAMP_HI]; 1 - x is not representable closer to 1
CLAMP_LO = 1e-300
CLAMP_HI = 1e-15
SUM_TOL = 1e-10
STATIONARITY_TOL = 1e-8
MAX_ITER = 200


@dataclass(frozen=True)
class ShannonFull:
    weight: float
    kind = SHANNON_FULL


@dataclass(frozen=True)
class ShannonPair:
    weight: float
    kind = SHANNON_PAIR


@dataclass(frozen=True)
class RootPair:
    weight: float
    kind = ROOT_PAIR


class RegularizerSpec:
    """Coordinate-indexed assignment of regularizer terms.

    Stored as two parallel arrays (``kinds``, ``weights``) so that the policies
    can rebuild a spec every round without allocating term objects.
    """

    __slots__ = ("kinds", "weights")

    def __init__(self, kinds, weights):
        kinds = np.ascontiguousarray(kinds, dtype=np.int64)
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if kinds.shape != weights.shape or kinds.ndim != 1:
            raise BadParameterError("kinds and weights must be 1-d arrays of equal length")
        if not np.all(np.isin(kinds, (SHANNON_FULL, SHANNON_PAIR, ROOT_PAIR))):
            raise BadParameterError("unknown regularizer kind")
        if not (np.all(np.isfinite(weights)) and np.all(weights > 0)):
            raise BadParameterError("regularizer weights must be finite and strictly positive")
        self.kinds = kinds
        self.weights = weights

    @classmethod
    def _unchecked(cls, kinds: np.ndarray, weights: np.ndarray) -> "RegularizerSpec":
        # hot path for policies that build valid arrays every round
        spec = cls.__new__(cls)
        spec.kinds = kinds
        spec.weights = weights
        return spec

    @classmethod
    def from_terms(cls, terms: Sequence) -> "RegularizerSpec":
        return cls([t.kind for t in terms], [t.weight for t in terms])

    @classmethod
    def uniform(cls, kind: int, weight: float, k: int) -> "RegularizerSpec":
        return cls(np.full(k, kind), np.full(k, float(weight)))

    def __len__(self) -> int:
        return len(self.kinds)

    def __repr__(self) -> str:
        return f"RegularizerSpec(kinds={self.kinds.tolist()}, weights={self.weights.tolist()})"


# ---------------------------------------------------------------------------
# compiled kernels


@numba.njit(cache=True)
def _root_small_side(s):
    """Solve ``y**-0.5 - (1-y)**-0.5 = s`` for ``s >= 0`` (so ``y <= 1/2``)."""
    lo, hi = 0.0, 0.5
    y = 1.0 / ((s + math.sqrt(2.0)) ** 2)
    for _ in range(100):
        ry = 1.0 / math.sqrt(y)
        rz = 1.0 / math.sqrt(1.0 - y)
        phi = ry - rz - s
        if phi > 0.0:
            lo = y
        else:
            hi = y
        dphi = -0.5 * (ry * ry * ry + rz * rz * rz)
        y_new = y - phi / dphi
        if not (lo < y_new < hi):
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= 1e-17 + 4e-16 * y:
            y = y_new
            break
        y = y_new
    return y


@numba.njit(cache=True)
def _coordinate(kind, w, mu):
    """Return ``(x, dx/dmu)`` solving ``f'(x) = -mu`` for one coordinate."""
    if kind == SHANNON_FULL:
        z = -mu / w - 1.0
        x = math.exp(z) if z < 700.0 else 1.0
        dx = -x / w
    elif kind == SHANNON_PAIR:
        z = mu / w
        if z > 0.0:
            e = math.exp(-z)
            x = e / (1.0 + e)
        else:
            x = 1.0 / (1.0 + math.exp(z))
        dx = -x * (1.0 - x) / w
    else:
        s = mu / w
        if s >= 0.0:
            y = _root_small_side(s)
            x = y
        else:
            y = _root_small_side(-s)
            x = 1.0 - y
        fpp = 0.5 * w * (y ** -1.5 + (1.0 - y) ** -1.5)
        dx = -1.0 / fpp
    # a clamped coordinate is locally constant
    if x < CLAMP_LO:
        x = CLAMP_LO
        dx = 0.0
    elif x > 1.0 - CLAMP_HI:
        x = 1.0 - CLAMP_HI
        dx = 0.0
    return x, dx


@numba.njit(cache=True)
def _fprime(kind, w, x):
    if kind == SHANNON_FULL:
        return w * (math.log(x) + 1.0)
    if kind == SHANNON_PAIR:
        return w * (math.log(x) - math.log1p(-x))
    return w * (-1.0 / math.sqrt(x) + 1.0 / math.sqrt(1.0 - x))


@numba.njit(cache=True)
def _solve_kernel(L, kinds, weights, out, max_iter):
    k = L.shape[0]
    target = 1.0 / k
    lam_lo = np.inf
    lam_hi = -np.inf
    for i in range(k):
        lam_i = -_fprime(kinds[i], weights[i], target) - L[i]
        lam_lo = min(lam_lo, lam_i)
        lam_hi = max(lam_hi, lam_i)
    # at lam_lo every x_i >= 1/K, at lam_hi every x_i <= 1/K
    lam = lam_lo
    g = 0.0
    g_prev = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        total = 0.0
        slope = 0.0
        for i in range(k):
            x, dx = _coordinate(kinds[i], weights[i], L[i] + lam)
            out[i] = x
            total += x
            slope += dx
        g = total - 1.0
        if abs(g) <= 1e-14:
            break
        if g > 0.0:
            lam_lo = lam
        else:
            lam_hi = lam
        if lam_hi - lam_lo <= 4e-16 * max(1.0, abs(lam)):
            break
        lam_new = lam - g / slope if slope < 0.0 else 0.5 * (lam_lo + lam_hi)
        # bisect when Newton leaves the bracket or stalls
        if not (lam_lo < lam_new < lam_hi) or abs(g) > 0.5 * g_prev:
            lam_new = 0.5 * (lam_lo + lam_hi)
        g_prev = abs(g)
        lam = lam_new
    return lam, g, it, lam_lo, lam_hi


@numba.njit(cache=True)
def _stationarity(L, kinds, weights, lam):
    # Shannon terms are inverted in closed form; only the iterative root-pair
    # inversions can leave a residual.  Evaluated on the small side so that
    # coordinates close to 1 keep full precision.
    worst = 0.0
    for i in range(L.shape[0]):
        if kinds[i] != ROOT_PAIR:
            continue
        s = (L[i] + lam) / weights[i]
        y = _root_small_side(abs(s))
        if y <= CLAMP_HI:
            continue
        # relative to max(1, |f'|): the float floor of f' scales with it
        w = weights[i]
        r = w * abs(1.0 / math.sqrt(y) - 1.0 / math.sqrt(1.0 - y) - abs(s)) / max(1.0, w * (1.0 + abs(s)))
        worst = max(worst, r)
    return worst


# ---------------------------------------------------------------------------
# public API


def _as_losses(L) -> np.ndarray:
    L = np.ascontiguousarray(L, dtype=np.float64)
    if not np.all(np.isfinite(L)):
        raise NonFiniteError("loss vector contains non-finite entries")
    return L


def solve_shannon(L, beta: float) -> np.ndarray:
    """Minimiser of ``<L, p> - beta * H(p)``: the softmax of ``-L / beta``."""
    L = _as_losses(L)
    if not beta > 0:
        raise BadParameterError(f"beta must be positive, got {beta}")
    z = np.exp(-(L - L.min()) / beta)
    return z / z.sum()


def solve_separable(L, spec: RegularizerSpec, max_iter: int = MAX_ITER, *, return_multiplier: bool = False):
    """Minimise ``sum_i L_i p_i + f_i(p_i)`` over the simplex.

    Parameters
    ----------
    L : array_like
        Cumulative (estimated) losses.
    spec : RegularizerSpec
        Per-coordinate regularizer terms.
    max_iter : int
        Cap on outer Newton/bisection iterations.
    return_multiplier : bool
        Also return the Lagrange multiplier ``lam``.

    Raises
    ------
    NoConvergenceError
        If ``|sum(q) - 1| > 1e-10`` or the stationarity residual exceeds
        ``1e-8`` (relative to ``max(1, |f'|)``) when the iteration stops.
    """
    L = _as_losses(L)
    if len(spec) != L.shape[0]:
        raise BadParameterError(f"spec has {len(spec)} coordinates but L has {L.shape[0]}")
    q = np.empty_like(L)
    lam, g, it, lo, hi = _solve_kernel(L, spec.kinds, spec.weights, q, max_iter)
    residual = _stationarity(L, spec.kinds, spec.weights, lam)
    if abs(g) > SUM_TOL or residual > STATIONARITY_TOL:
        raise NoConvergenceError(
            f"separable FTRL solve stopped after {it} iterations with |sum-1|={abs(g):.3e}, "
            f"stationarity residual {residual:.3e}",
            bracket=(lo, hi),
            residual=max(abs(g), residual),
            iterations=it,
        )
    if return_multiplier:
        return q, lam
    return q


def regularizer_gradient(q, spec: RegularizerSpec) -> np.ndarray:
    """Per-coordinate derivatives ``f_i'(q_i)``."""
    q = np.asarray(q, dtype=np.float64)
    w = spec.weights
    out = np.empty_like(q)
    full = spec.kinds == SHANNON_FULL
    pair = spec.kinds == SHANNON_PAIR
    root = spec.kinds == ROOT_PAIR
    out[full] = w[full] * (np.log(q[full]) + 1.0)
    out[pair] = w[pair] * (np.log(q[pair]) - np.log1p(-q[pair]))
    out[root] = w[root] * (-1.0 / np.sqrt(q[root]) + 1.0 / np.sqrt(1.0 - q[root]))
    return out


def kkt_residual(q, L, spec: RegularizerSpec) -> float:
    """Optimality certificate: ``max_i |f_i'(q_i) + L_i + lam_hat|``.

    ``lam_hat`` is the mean of ``-(f_i'(q_i) + L_i)``; the residual vanishes
    exactly at the constrained minimiser.
    """
    q = np.asarray(q, dtype=np.float64)
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise BoundaryPointError("KKT residual needs a strictly interior point")
    g = regularizer_gradient(q, spec) + np.asarray(L, dtype=np.float64)
    return float(np.max(np.abs(g - g.mean())))


# ---------------------------------------------------------------------------
# entropy functionals (0 ln 0 = 0)


def _xlogx(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def _select(p, coords: Optional[Iterable[int]]) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if coords is None:
        return p
    idx = np.fromiter((c - 1 for c in coords), dtype=np.int64)
    return p[idx]


def shannon_entropy(p) -> float:
    """``H(p) = sum_i p_i ln(1/p_i)``."""
    return float(max(-_xlogx(p).sum(), 0.0))


def pair_entropy_sum(p, coords: Optional[Iterable[int]] = None) -> float:
    """``-sum_{i in coords} h(p_i)`` with ``h(x) = x ln x + (1-x) ln(1-x)``.

    ``coords`` are 1-indexed vertices; ``None`` means all of them.
    """
    x = _select(p, coords)
    return float(max(-(_xlogx(x) + _xlogx(1.0 - x)).sum(), 0.0))


def pair_variance_sum(p, coords: Optional[Iterable[int]] = None) -> float:
    """``sum_{i in coords} p_i (1 - p_i)``."""
    x = _select(p, coords)
    return float(np.sum(x * (1.0 - x)))


def entropy_bound(p, i_star: int) -> float:
    """Upper bound ``(1 - p*) (ln((K-1)/(1 - p*)) + 1)`` on ``H(p)``; 0 when ``p* = 1``."""
    p = np.asarray(p, dtype=np.float64)
    # mass off i*, summed directly so that p* close to 1 does not cancel
    rest = float(p.sum() - p[i_star - 1]) if p.shape[0] > 1 else 0.0
    rest = min(rest, 1.0)
    if rest <= 0.0:
        return 0.0
    return float(rest * (math.log((p.shape[0] - 1) / rest) + 1.0))
