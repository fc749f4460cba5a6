"""User-association subproblem for fixed power and fixed efficiency weight q.

The combinatorial association problem is attacked through its KKT system:
auxiliary per-link variables t (effective-rate surrogates) and multipliers
lambda are driven to the stationarity targets

    t_nk      -> r_nk / y_k
    lambda_nk -> (1 - q xi_k) x_nk / y_k

by damped fixed-point steps, and the assignment is rebuilt each pass from
the utility  (1 - q xi_k) t_nk - sum_i lambda_ik t_ik:  every BS in turn
claims its best unclaimed UE (which enforces C2), then the remaining UEs
attach to their best BS.
"""

from dataclasses import dataclass

import numpy as np

from . import channel, model


@dataclass
class UaConfig:
    eta: float = 1.0          # damping of the fixed-point step, in (0, 1]
    tol: float = 1e-8         # max-norm residual against the targets
    max_iters: int = 200
    m_steps: int = 1          # fixed-point sub-steps per assignment pass


@dataclass
class UaState:
    t: np.ndarray        # (N, K) auxiliary effective rates, Mbps
    lam: np.ndarray      # (N, K) dual variables
    assoc: model.Association
    iteration: int = 0


@dataclass
class UaDiagnostics:
    iterations: int       # assignment passes (T1)
    inner_updates: int    # fixed-point sub-steps taken (m total)
    converged: bool


def ua_utility(n, k, t, lam, q, inst):
    """Utility of UE n toward BS k:  (1 - q xi_k) t_nk - sum_i lambda_ik t_ik."""
    return (1.0 - q * inst.xi[k]) * t[n, k] - float(lam[:, k] @ t[:, k])


def _utility_matrix(t, lam, q, xi):
    return (1.0 - q * xi) * t - np.sum(lam * t, axis=0)


def _targets(assoc, rates, q, xi):
    """Stationarity targets for (t, lambda) at the given association."""
    loads = assoc.loads
    t_star = rates / loads
    lam_star = (1.0 - q * xi) * assoc.x_matrix() / loads
    return t_star, lam_star


def update_t_lambda(state: UaState, p, q, inst, eta=1.0) -> UaState:
    """One damped fixed-point step of (t, lambda) toward the targets of the
    state's current association; eta = 1 jumps exactly onto them."""
    rates = channel.rate_matrix(p, inst)
    t_star, lam_star = _targets(state.assoc, rates, q, inst.xi)
    return UaState(
        t=state.t + eta * (t_star - state.t),
        lam=state.lam + eta * (lam_star - state.lam),
        assoc=state.assoc,
        iteration=state.iteration,
    )


def _greedy_assignment(util, n_bs) -> model.Association:
    """BSs claim their best unclaimed UE in index order, then the remaining
    UEs attach to their best BS.  Ties break to the lowest index."""
    n_ue = util.shape[0]
    assign = np.empty(n_ue, dtype=np.int64)
    unclaimed = np.ones(n_ue, dtype=bool)
    for k in range(n_bs):
        cand = np.flatnonzero(unclaimed)
        n_star = cand[np.argmax(util[cand, k])]
        assign[n_star] = k
        unclaimed[n_star] = False
    rest = np.flatnonzero(unclaimed)
    if rest.size:
        assign[rest] = np.argmax(util[rest, :], axis=1)
    return model.Association(assign=assign, num_stations=n_bs)


def association_objective(assoc: model.Association, rates, q, xi):
    """Value of the weighted sum-effective-rate objective
    sum_k sum_n [(1 - q xi_k)/y_k] x_nk r_nk for precomputed link rates."""
    loads = assoc.loads
    n_idx = np.arange(assoc.num_users)
    assigned = rates[n_idx, assoc.assign]
    per_bs = np.bincount(assoc.assign, weights=assigned, minlength=assoc.num_stations)
    safe = np.maximum(loads, 1)
    return float(np.sum((1.0 - q * xi) * per_bs / safe))


def solve_ua(p, q, inst, cfg: UaConfig = None, init_assoc=None):
    """Run the association heuristic; returns (Association, UaState, UaDiagnostics).

    Starts from init_assoc when given (warm start), otherwise from the
    max-gain association repaired for C2.  Each pass updates (t, lambda)
    toward the current association's targets, rebuilds the assignment from
    the utilities, and stops once the assignment is stable and the
    fixed-point residuals are below tolerance.  If the iteration cap is
    hit, the best assignment seen (by objective value) is returned and the
    result is flagged as not converged.
    """
    if cfg is None:
        cfg = UaConfig()
    p = np.asarray(p, dtype=np.float64)
    rates = channel.rate_matrix(p, inst)
    xi = inst.xi
    n_bs = inst.num_stations

    if init_assoc is None:
        assoc = model.greedy_c2_association(inst.gains)
    else:
        assoc = init_assoc.copy()

    t = rates.copy()
    lam = np.zeros_like(rates)
    best_assoc = assoc
    best_obj = association_objective(assoc, rates, q, xi)

    inner_updates = 0
    converged = False
    iteration = 0
    for iteration in range(1, cfg.max_iters + 1):
        t_star, lam_star = _targets(assoc, rates, q, xi)
        for _ in range(cfg.m_steps):
            t += cfg.eta * (t_star - t)
            lam += cfg.eta * (lam_star - lam)
            inner_updates += 1

        util = _utility_matrix(t, lam, q, xi)
        new_assoc = _greedy_assignment(util, n_bs)

        obj = association_objective(new_assoc, rates, q, xi)
        if obj > best_obj:
            best_obj = obj
            best_assoc = new_assoc

        stable = new_assoc == assoc
        assoc = new_assoc
        if stable:
            t_star, lam_star = _targets(assoc, rates, q, xi)
            res = max(
                float(np.max(np.abs(t - t_star))),
                float(np.max(np.abs(lam - lam_star))),
            )
            if res <= cfg.tol:
                converged = True
                break

    result = assoc if converged else best_assoc
    state = UaState(t=t, lam=lam, assoc=result, iteration=iteration)
    diag = UaDiagnostics(
        iterations=iteration, inner_updates=inner_updates, converged=converged
    )
    return result, state, diag
