"""Independent reference implementations used as test oracles.

Nothing here calls into the solver, the graph search routines or the policy
update code; each oracle is a plain restatement of the definition.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

SHANNON_FULL, SHANNON_PAIR, ROOT_PAIR = 0, 1, 2


# ---------------------------------------------------------------------------
# separable FTRL objective


def _terms(kind, w, x):
    """``f, f', f''`` of one regularizer term at ``x`` (vectorized over x)."""
    if kind == SHANNON_FULL:
        return w * x * np.log(x), w * (np.log(x) + 1.0), w / x
    if kind == SHANNON_PAIR:
        y = 1.0 - x
        return w * (x * np.log(x) + y * np.log(y)), w * (np.log(x) - np.log(y)), w * (1.0 / x + 1.0 / y)
    y = 1.0 - x
    f = -2.0 * w * (np.sqrt(x) + np.sqrt(y))
    g = w * (1.0 / np.sqrt(y) - 1.0 / np.sqrt(x))
    h = 0.5 * w * (x**-1.5 + y**-1.5)
    return f, g, h


def objective(p, L, kinds, weights):
    total = float(np.dot(L, p))
    grad = np.array(L, dtype=np.float64)
    hess = np.empty_like(grad)
    for i, (k, w) in enumerate(zip(kinds, weights)):
        f, g, h = _terms(k, w, p[i])
        total += f
        grad[i] += g
        hess[i] = h
    return total, grad, hess


def projected_gradient_oracle(L, kinds, weights, tol=1e-13, max_iter=10_000):
    """Minimize ``<L, p> + sum f_i(p_i)`` over the simplex by projected descent.

    Each step moves along the (diagonally preconditioned) gradient projected
    onto ``sum d = 0``, with a backtracking line search that keeps the
    iterate strictly inside the simplex.  Starts from the uniform point.
    """
    L = np.asarray(L, dtype=np.float64)
    k = L.size
    p = np.full(k, 1.0 / k)
    val, grad, hess = objective(p, L, kinds, weights)
    for _ in range(max_iter):
        inv = 1.0 / hess
        nu = np.dot(grad, inv) / inv.sum()
        d = -(grad - nu) * inv
        decrement = -np.dot(grad, d)
        if decrement < tol:
            break
        step = 1.0
        neg = d < 0
        if np.any(neg):
            step = min(1.0, 0.99 * np.min(-p[neg] / d[neg]))
        while True:
            cand = p + step * d
            cand_val, cand_grad, cand_hess = objective(cand, L, kinds, weights)
            if cand_val <= val - 1e-4 * step * decrement or step < 1e-20:
                break
            step *= 0.5
        p, val, grad, hess = cand, cand_val, cand_grad, cand_hess
    return p / p.sum()


def kkt_oracle(p, L, kinds, weights):
    """Spread of ``f'_i(p_i) + L_i`` across coordinates (zero at the optimum)."""
    _, grad, _ = objective(p, L, kinds, weights)
    return float(grad.max() - grad.min())


# ---------------------------------------------------------------------------
# graphs as adjacency matrices (0-indexed bool arrays)


def brute_force_alpha(adj) -> int:
    """Largest vertex set without an edge in either direction, by subset enumeration."""
    adj = np.asarray(adj, dtype=bool)
    k = adj.shape[0]
    sym = adj | adj.T
    best = 0
    for mask in range(1 << k):
        verts = [i for i in range(k) if mask >> i & 1]
        if len(verts) <= best:
            continue
        if all(not sym[i, j] for i in verts for j in verts if i != j):
            best = len(verts)
    return best


def domination_targets(adj, definition: str) -> set:
    """Vertices a weakly dominating set must cover (0-indexed)."""
    adj = np.asarray(adj, dtype=bool)
    k = adj.shape[0]
    loopless = {i for i in range(k) if not adj[i, i]}
    if definition == "no_self_loop":
        return loopless
    # weakly observable vertices: no self-loop and not observed by every other vertex
    return {i for i in loopless if not all(adj[j, i] for j in range(k) if j != i)}


def brute_force_delta(adj, definition: str):
    """Minimum size of a set whose out-neighbourhoods cover the targets, or None."""
    adj = np.asarray(adj, dtype=bool)
    k = adj.shape[0]
    targets = domination_targets(adj, definition)
    if not targets:
        return 0
    best = None
    for mask in range(1, 1 << k):
        size = bin(mask).count("1")
        if best is not None and size >= best:
            continue
        covered = set()
        for i in range(k):
            if mask >> i & 1:
                covered.update(np.flatnonzero(adj[i]).tolist())
        if targets <= covered:
            best = size
    return best


def observability(adj) -> str:
    adj = np.asarray(adj, dtype=bool)
    k = adj.shape[0]
    strong = True
    for i in range(k):
        if not adj[:, i].any():
            return "unobservable"
        if not (adj[i, i] or all(adj[j, i] for j in range(k) if j != i)):
            strong = False
    return "strongly_observable" if strong else "weakly_observable"


# ---------------------------------------------------------------------------
# learning-rate recurrences, written out line by line


def strong_recurrence(entropies, c1, k):
    """``beta_t`` and ``gamma_t`` for rounds ``1..len(entropies)`` given ``a_t = H(q_t)``."""
    betas, gammas = [], []
    beta = c1
    total = 0.0
    for a in entropies:
        betas.append(beta)
        gammas.append(1.0 / (2.0 * beta))
        total += a
        beta = beta + c1 / math.sqrt(1.0 + total / math.log(k))
    return betas, gammas


def weak_recurrence(a_seq, b_seq, c1, c2, d_size):
    """``(beta_t, gamma'_t, gamma_t)`` from the entropy sequences, unclipped."""
    n = len(a_seq)
    beta = [max(c2, 8 * d_size)]
    gp, gam, ratios = [], [], []
    for t in range(n):
        b_cum = sum(b_seq[: t + 1])
        gpt = 0.25 * c1 * b_seq[t] / (c1 + b_cum ** (1.0 / 3.0))
        gp.append(gpt)
        gam.append(gpt + 2.0 * d_size / beta[t])
        # b_t / gamma'_t, taking its limit when b_t vanishes
        if b_seq[t] > 1e-12:
            ratios.append(b_seq[t] / gpt)
        else:
            ratios.append(4.0 * (c1 + b_cum ** (1.0 / 3.0)) / c1)
        z = sum(ratios[s] * a_seq[s + 1] for s in range(t))
        beta.append(beta[t] + c2 * ratios[t] / math.sqrt(c1 + z))
    return beta[:n], gp, gam


def shannon_entropy(q) -> float:
    q = np.asarray(q, dtype=np.float64)
    nz = q[q > 0]
    return float(-np.sum(nz * np.log(nz)))


def all_loss_patterns(k):
    return itertools.product((0.0, 1.0), repeat=k)
