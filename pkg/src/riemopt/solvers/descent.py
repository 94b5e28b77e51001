"""First-order solvers: steepest descent and nonlinear conjugate gradients.

Both use Armijo backtracking (or a user-supplied line search) with an
adaptive initial step: twice the previous cost decrease divided by the
directional derivative, which keeps the expected number of backtracks
around one.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..exceptions import DegenerateStepError, RankCollapseError
from ..problem import CacheStore, ProblemDef, apply_precond, get_cost, get_gradient
from .core import (
    GRADIENT_TOLERANCE,
    STEP_COLLAPSE,
    IterationRecord,
    RunResult,
    SolverOptions,
    backtracking_line_search,
    emit_record,
    shared_stopping,
)


def _make_phi(p, M, x, d, store):
    """Cost along the retracted ray; degenerate trial steps count as +inf."""

    def phi(t):
        try:
            return get_cost(p, M.retract(x, d, t), store, None)
        except (DegenerateStepError, RankCollapseError):
            return math.inf

    return phi


def _initial_step(prev_decrease, slope, typical_dist, dnorm):
    if prev_decrease is not None and prev_decrease > 0 and slope < 0:
        return 2.0 * prev_decrease / (-slope)
    return min(typical_dist / dnorm, typical_dist)


def _finish(M, x, f, gnorm, reason, history, store):
    return RunResult(
        x_final=x,
        cost_final=f,
        grad_norm_final=gnorm,
        stop_reason=reason,
        history=history,
        counters=store.counters(),
    )


def steepest_descent(
    p: ProblemDef,
    x0=None,
    opts: Optional[SolverOptions] = None,
    rng=None,
) -> RunResult:
    """Riemannian gradient descent with Armijo backtracking."""
    opts = opts if opts is not None else SolverOptions()
    M = p.manifold
    store = CacheStore(caching=opts.caching)
    x = x0 if x0 is not None else M.rand_point(rng if rng is not None else np.random.default_rng(0))
    t_start = opts.clock()

    history = []
    prev_decrease = None
    step_size = 0.0
    it = 0
    while True:
        tok = store.token()
        f = get_cost(p, x, store, tok)
        g = get_gradient(p, x, store, tok)
        gnorm = M.norm(x, g)
        rec = IterationRecord(it, f, gnorm, opts.clock() - t_start, step_size)
        history.append(rec)
        emit_record(rec, opts)
        stop, reason = shared_stopping(rec, opts)
        if stop:
            return _finish(M, x, f, gnorm, reason, history, store)
        if gnorm <= opts.tol_grad_norm:
            # Already critical; idle until min_iter allows the stop.
            step_size = 0.0
            it += 1
            continue

        d = M.lincomb(x, -1.0, g)
        slope = -(gnorm**2)
        t0 = _initial_step(prev_decrease, slope, M.typical_dist, gnorm)
        phi = _make_phi(p, M, x, d, store)
        search = opts.line_search or (
            lambda phi, f0, s, t0: backtracking_line_search(phi, f0, s, t0, opts)
        )
        ls = search(phi, f, slope, t0)
        if ls is None:
            return _finish(M, x, f, gnorm, STEP_COLLAPSE, history, store)
        t, f_new = ls
        prev_decrease = f - f_new
        x = M.retract(x, d, t)
        store.discard_except([])
        step_size = t * gnorm
        it += 1


def conjugate_gradient(
    p: ProblemDef,
    x0=None,
    opts: Optional[SolverOptions] = None,
    rng=None,
) -> RunResult:
    """Preconditioned nonlinear CG with the Polak-Ribiere-plus beta rule.

    The search direction is transported to each new point; beta is clamped
    at zero and the direction is reset to steepest descent whenever it
    fails to be a descent direction.
    """
    opts = opts if opts is not None else SolverOptions()
    if opts.beta_rule != "PR+":
        raise ValueError(f"unsupported beta_rule {opts.beta_rule!r}; only 'PR+'")
    M = p.manifold
    store = CacheStore(caching=opts.caching)
    x = x0 if x0 is not None else M.rand_point(rng if rng is not None else np.random.default_rng(0))
    t_start = opts.clock()

    history = []
    prev_decrease = None
    step_size = 0.0
    d = None
    g = None
    it = 0
    while True:
        tok = store.token()
        f = get_cost(p, x, store, tok)
        g = get_gradient(p, x, store, tok)
        pg = apply_precond(p, x, g)
        gnorm = M.norm(x, g)
        rec = IterationRecord(it, f, gnorm, opts.clock() - t_start, step_size)
        history.append(rec)
        emit_record(rec, opts)
        stop, reason = shared_stopping(rec, opts)
        if stop:
            return _finish(M, x, f, gnorm, reason, history, store)
        if gnorm <= opts.tol_grad_norm:
            step_size = 0.0
            d = None
            it += 1
            continue

        if d is None or M.inner(x, d, g) >= 0:
            d = M.lincomb(x, -1.0, pg)
        slope = M.inner(x, g, d)
        dnorm = M.norm(x, d)
        t0 = _initial_step(prev_decrease, slope, M.typical_dist, dnorm)
        phi = _make_phi(p, M, x, d, store)
        search = opts.line_search or (
            lambda phi, f0, s, t0: backtracking_line_search(phi, f0, s, t0, opts)
        )
        ls = search(phi, f, slope, t0)
        if ls is None:
            return _finish(M, x, f, gnorm, STEP_COLLAPSE, history, store)
        t, f_new = ls
        prev_decrease = f - f_new

        x_new = M.retract(x, d, t)
        tok_new = store.token()
        g_new = get_gradient(p, x_new, store, tok_new)
        pg_new = apply_precond(p, x_new, g_new)
        pg_moved = M.transport(x, x_new, pg)
        d_moved = M.transport(x, x_new, d)
        denom = M.inner(x, g, pg)
        beta = 0.0
        if denom > 0:
            beta = max(
                0.0,
                M.inner(x_new, g_new, M.lincomb(x_new, 1.0, pg_new, -1.0, pg_moved))
                / denom,
            )
        d = M.lincomb(x_new, -1.0, pg_new, beta, d_moved)
        x = x_new
        store.discard_except([tok_new])
        step_size = t * dnorm
        it += 1
