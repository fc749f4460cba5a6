"""Power-control subproblem for a fixed association and fixed weight q.

Successive convex approximation with the logarithmic lower bound

    alpha log z + beta <= log(1 + z),   tight at the anchor z~,

combined with the change of variables rho_k = log p_k.  Each round anchors
the bound at the current SINRs, maximizes the resulting concave surrogate
over the power box by projected gradient ascent with backtracking, and
re-anchors; the true objective is non-decreasing across rounds.
"""

from dataclasses import dataclass, field

import numpy as np

from . import channel, kernels, model

_LN2 = float(np.log(2.0))


@dataclass
class PcConfig:
    tol_outer: float = 1e-6    # relative improvement of the true objective
    tol_inner: float = 1e-8    # projected-gradient max-norm
    max_rounds: int = 50       # SCALE re-anchoring cap (T2)
    max_inner: int = 500       # inner ascent iteration cap per round (L)
    p_min_ratio: float = 1e-6  # power floor as a fraction of p_max


@dataclass
class ScaleCoeffs:
    """Per-link lower-bound coefficients; 0 < alpha < 1, tight at the anchor."""

    alpha: np.ndarray
    beta: np.ndarray


@dataclass
class LogPower:
    rho: np.ndarray  # log of per-BS transmit power (natural log of Watts)


@dataclass
class PcDiagnostics:
    rounds: int                 # T2
    inner_iters: int            # L, summed over rounds
    objective_trace: list = field(default_factory=list)
    converged: bool = True


def scale_coeffs(z_anchor):
    """Bound coefficients anchored at z~:  alpha = z/(1+z),
    beta = log(1+z) - alpha log(z).  Elementwise on arrays."""
    z = np.asarray(z_anchor, dtype=np.float64)
    if np.any(z <= 0):
        raise ValueError("anchor SINR must be positive")
    alpha = z / (1.0 + z)
    beta = np.log1p(z) - alpha * np.log(z)
    if np.ndim(z_anchor) == 0:
        return float(alpha), float(beta)
    return ScaleCoeffs(alpha=alpha, beta=beta)


def association_weights(assoc: model.Association, q, inst):
    """w_nk = (1 - q xi_k) x_nk / y_k; zero for unassigned pairs."""
    w = np.zeros((assoc.num_users, assoc.num_stations))
    loads = assoc.loads
    n_idx = np.arange(assoc.num_users)
    w[n_idx, assoc.assign] = (1.0 - q * inst.xi[assoc.assign]) / loads[assoc.assign]
    return w


def _surrogate_terms(coeffs: ScaleCoeffs, assoc, q, inst):
    """Premultiplied kernel inputs: per-link log-SINR weights, the constant
    offset, and the exp(rho) cost coefficients."""
    c_nats = inst.rate_scale / _LN2  # Mbps per natural-log unit
    w = association_weights(assoc, q, inst)
    aw = np.ascontiguousarray(w * coeffs.alpha * c_nats)
    bw_sum = float(np.sum(w * coeffs.beta)) * c_nats
    pow_cost = np.ascontiguousarray(q * inst.varrho)
    return aw, bw_sum, pow_cost


def surrogate_objective(rho, coeffs: ScaleCoeffs, assoc, q, inst):
    """Value of the concave surrogate at rho = log(p), in Mbps-consistent units."""
    rho = np.ascontiguousarray(getattr(rho, "rho", rho), dtype=np.float64)
    aw, bw_sum, pow_cost = _surrogate_terms(coeffs, assoc, q, inst)
    return kernels.surrogate_value(rho, inst.gains, inst.noise_power, aw, bw_sum, pow_cost)


def surrogate_gradient(rho, coeffs: ScaleCoeffs, assoc, q, inst):
    """Gradient of the surrogate with respect to rho; shape (K,)."""
    rho = np.ascontiguousarray(getattr(rho, "rho", rho), dtype=np.float64)
    aw, bw_sum, pow_cost = _surrogate_terms(coeffs, assoc, q, inst)
    _, grad = kernels.surrogate_value_grad(
        rho, inst.gains, inst.noise_power, aw, bw_sum, pow_cost
    )
    return grad


def pc_objective(assoc: model.Association, p, q, inst):
    """True power-control objective (weighted sum effective rate minus
    weighted transmit power) at powers p."""
    return model.parametric_value(assoc, p, q, inst)


def _power_box(inst, cfg):
    p_max = inst.p_max
    return cfg.p_min_ratio * p_max, p_max


def solve_inner(coeffs: ScaleCoeffs, assoc, q, inst, cfg: PcConfig, rho_init):
    """Maximize the surrogate over the log-power box.

    Projected gradient ascent with a Barzilai-Borwein step seed and a
    nonmonotone backtracking line search (reference value over the last
    few iterates, with a round-off allowance so progress is not blocked
    once improvements fall below double precision).  The best iterate seen
    is returned, so the result never undercuts the starting value.
    Returns (LogPower, iterations, converged).
    """
    aw, bw_sum, pow_cost = _surrogate_terms(coeffs, assoc, q, inst)
    gains, noise = inst.gains, inst.noise_power
    p_lo, p_hi = _power_box(inst, cfg)
    lo, hi = np.log(p_lo), np.log(p_hi)

    minimum, maximum = np.minimum, np.maximum
    rho = minimum(
        maximum(
            np.ascontiguousarray(getattr(rho_init, "rho", rho_init), dtype=np.float64), lo
        ),
        hi,
    )
    box_width = float(np.max(hi - lo))
    val, grad = kernels.surrogate_value_grad(rho, gains, noise, aw, bw_sum, pow_cost)
    best_val, best_rho = val, rho
    history = [val]
    step = 1.0
    iters = 0
    converged = False
    while iters < cfg.max_inner:
        iters += 1
        pg = minimum(maximum(rho + grad, lo), hi) - rho
        if np.max(np.abs(pg)) <= cfg.tol_inner:
            converged = True
            break

        # Steps far beyond the box are pointless: the projection saturates.
        g_max = float(np.max(np.abs(grad)))
        s = min(step, 2.0 * box_width / g_max)
        ref = max(history)
        slack = 1e-12 * (1.0 + abs(ref))
        accepted = False
        for _ in range(60):
            rho_new = minimum(maximum(rho + s * grad, lo), hi)
            d = rho_new - rho
            gd = float(grad @ d)
            if gd > 0.0:
                val_new = kernels.surrogate_value(rho_new, gains, noise, aw, bw_sum, pow_cost)
                if val_new >= ref + 1e-4 * gd - slack:
                    accepted = True
                    break
            s *= 0.5
        if not accepted:
            break  # numerically stationary; keep the best point seen

        _, grad_new = kernels.surrogate_value_grad(rho_new, gains, noise, aw, bw_sum, pow_cost)
        s_vec = rho_new - rho
        y_vec = grad - grad_new
        sy = float(s_vec @ y_vec)
        if sy > 0.0:
            step = float(s_vec @ s_vec) / sy
            step = min(max(step, 1e-10), 1e6)
        else:
            step = 2.0 * s
        rho, val, grad = rho_new, val_new, grad_new
        history.append(val)
        if len(history) > 10:
            history.pop(0)
        if val > best_val:
            best_val, best_rho = val, rho

    return LogPower(rho=best_rho), iters, converged


def _scale_descent(assoc, q, p0, inst, cfg):
    """One SCALE run from p0: anchor at the current SINRs, maximize the
    surrogate, update the powers, repeat until the true objective stalls.
    The returned trace is non-decreasing."""
    p = p0
    obj = pc_objective(assoc, p, q, inst)
    trace = [obj]
    inner_total = 0
    converged = False
    rounds = 0
    while rounds < cfg.max_rounds:
        rounds += 1
        anchors = channel.sinr_matrix(p, inst)
        coeffs = scale_coeffs(anchors)
        lp, iters, _ = solve_inner(coeffs, assoc, q, inst, cfg, np.log(p))
        inner_total += iters
        p_lo, p_hi = _power_box(inst, cfg)
        p_new = np.clip(np.exp(lp.rho), p_lo, p_hi)
        obj_new = pc_objective(assoc, p_new, q, inst)
        if obj_new < obj:
            # The bound guarantees non-decrease; a drop can only be round-off.
            converged = True
            break
        trace.append(obj_new)
        gain = obj_new - obj
        p, obj = p_new, obj_new
        if gain <= cfg.tol_outer * max(1.0, abs(obj)):
            converged = True
            break
    return p, obj, rounds, inner_total, trace, converged


def solve_pc(assoc: model.Association, q, p_init, inst, cfg: PcConfig = None, warm=False):
    """Successive convex approximation for the power subproblem.

    A cold call (warm=False) runs the SCALE descent twice, from p_init and
    from the power floor, and keeps the better endpoint: the problem is
    nonconvex and the two starts land in different basins often enough to
    matter.  Warm calls (continuing from a previous solution) run a single
    descent.  Returns (PowerAllocation, PcDiagnostics); the reported
    objective trace is the winning run's and is non-decreasing.
    """
    if cfg is None:
        cfg = PcConfig()
    p_lo, p_hi = _power_box(inst, cfg)
    p0 = np.clip(np.asarray(getattr(p_init, "p", p_init), dtype=np.float64), p_lo, p_hi)
    starts = [p0]
    if not warm:
        if not np.array_equal(p0, p_lo):
            starts.append(p_lo.copy())
        if inst.num_stations <= 4:
            # At small K the landscape is corner-driven: a single BS being
            # (almost) switched off defines the basins, so seed one run per
            # solo transmitter.
            for k in range(inst.num_stations):
                solo = p_lo.copy()
                solo[k] = p_hi[k]
                starts.append(solo)

    best = None
    rounds_total = 0
    inner_total = 0
    for start in starts:
        p, obj, rounds, inner, trace, conv = _scale_descent(assoc, q, start, inst, cfg)
        rounds_total += rounds
        inner_total += inner
        if best is None or obj > best[1]:
            best = (p, obj, trace, conv)

    p, _, trace, converged = best
    diag = PcDiagnostics(
        rounds=rounds_total,
        inner_iters=inner_total,
        objective_trace=trace,
        converged=converged,
    )
    return model.PowerAllocation(p=p), diag
