"""Comparison schemes sharing the same metric pipeline as the proposed solver.

All schemes return a Solution measured by the identical power model, so a
sweep isolates the effect of the association policy and the optimization
objective:

  UAPCEE     proposed: joint association + power control for EE
  RE         range expansion: biased max received power association,
             frozen-association EE power control
  MaxGain    strongest-gain association, frozen-association EE power control
  UAPCEEwB   EE pipeline that ignores backhaul power in its objective;
             measured against the full model
  JUAPCMSE   joint association + power control maximizing the sum
             effective rate (weight q pinned at zero)
"""

import numpy as np

from . import channel, dinkelbach, model, pc_solver, ua_solver

UAPCEE = "UAPCEE"
RE = "RE"
MAX_GAIN = "MaxGain"
UAPCEE_WB = "UAPCEEwB"
JUAPCMSE = "JUAPCMSE"

ALL_SCHEMES = (UAPCEE, JUAPCMSE, UAPCEE_WB, RE, MAX_GAIN)


def _frozen_assoc_dinkelbach(assoc, inst, cfg) -> dinkelbach.Solution:
    """Dinkelbach loop with the association fixed: only powers are optimized."""
    q = 0.0
    q_trace = []
    p = inst.p_max.copy()
    sub_diags = []
    converged = False
    for t in range(cfg.max_outer):
        q_trace.append(q)
        power, pc_diag = pc_solver.solve_pc(assoc, q, p, inst, cfg.pc, warm=t > 0)
        p = power.p
        sub_diags.append(dinkelbach.IterationDiagnostics(ua=None, pc=pc_diag))
        metrics = model.evaluate(assoc, p, inst)
        r_val, p_val = metrics.sum_effective_rate, metrics.total_power
        if abs(r_val - q * p_val) <= cfg.epsilon:
            converged = True
            break
        q = r_val / p_val
    return dinkelbach.Solution(
        assoc=assoc,
        power=power,
        q_star=q if converged else r_val / p_val,
        metrics=metrics,
        q_trace=q_trace,
        outer_iterations=len(q_trace),
        converged=converged,
        sub_diagnostics=sub_diags,
    )


def biased_power_scores(inst, bias_macro_db, bias_small_db):
    """Received power at maximum transmit power with a per-kind dB bias."""
    bias_db = np.array(
        [bias_macro_db if bs.kind == channel.MACRO else bias_small_db for bs in inst.stations]
    )
    return inst.gains * inst.p_max * 10.0 ** (bias_db / 10.0)


def solve_range_expansion(inst, cfg) -> dinkelbach.Solution:
    """Association by maximum biased received power (small cells boosted to
    offload the macro), repaired for C2, then frozen-association power
    control for energy efficiency."""
    scores = biased_power_scores(inst, cfg.re_bias_macro_db, cfg.re_bias_small_db)
    assoc = model.greedy_c2_association(scores)
    return _frozen_assoc_dinkelbach(assoc, inst, cfg)


def solve_max_gain(inst, cfg) -> dinkelbach.Solution:
    """Association by strongest channel gain, repaired for C2, then
    frozen-association power control for energy efficiency."""
    assoc = model.greedy_c2_association(inst.gains)
    return _frozen_assoc_dinkelbach(assoc, inst, cfg)


def solve_no_backhaul_objective(inst, cfg) -> dinkelbach.Solution:
    """Full EE pipeline with the backhaul term removed from its objective
    (xi forced to zero inside the optimizer), measured on the true model.

    The internal q_star optimizes the wrong denominator, so it can only
    overestimate the measured efficiency.
    """
    inner = dinkelbach.solve(inst.with_xi(0.0), cfg)
    metrics = model.evaluate(inner.assoc, inner.power.p, inst)
    return dinkelbach.Solution(
        assoc=inner.assoc,
        power=inner.power,
        q_star=inner.q_star,
        metrics=metrics,
        q_trace=inner.q_trace,
        outer_iterations=inner.outer_iterations,
        converged=inner.converged,
        sub_diagnostics=inner.sub_diagnostics,
    )


def solve_sum_rate(inst, cfg) -> dinkelbach.Solution:
    """Joint association + power control maximizing the sum effective rate:
    the alternation runs with q pinned at zero until the assignment is
    stable, with efficiency measured afterwards on the full power model."""
    assoc = None
    p = inst.p_max.copy()
    sub_diags = []
    converged = False
    for t in range(cfg.max_outer):
        cand, _, ua_diag = ua_solver.solve_ua(p, 0.0, inst, cfg.ua, init_assoc=assoc)
        prev = assoc
        if assoc is None or model.parametric_value(
            cand, p, 0.0, inst
        ) >= model.parametric_value(assoc, p, 0.0, inst):
            assoc = cand
        stable = prev is not None and assoc == prev
        power, pc_diag = pc_solver.solve_pc(assoc, 0.0, p, inst, cfg.pc, warm=t > 0)
        p = power.p
        sub_diags.append(dinkelbach.IterationDiagnostics(ua=ua_diag, pc=pc_diag))
        if stable:
            converged = True
            break
    metrics = model.evaluate(assoc, p, inst)
    return dinkelbach.Solution(
        assoc=assoc,
        power=power,
        q_star=metrics.energy_efficiency,
        metrics=metrics,
        q_trace=[],
        outer_iterations=len(sub_diags),
        converged=converged,
        sub_diagnostics=sub_diags,
    )


_SOLVERS = {
    UAPCEE: lambda inst, cfg: dinkelbach.solve(inst, cfg),
    RE: solve_range_expansion,
    MAX_GAIN: solve_max_gain,
    UAPCEE_WB: solve_no_backhaul_objective,
    JUAPCMSE: solve_sum_rate,
}


def solve_scheme(scheme, inst, cfg) -> dinkelbach.Solution:
    """Run one scheme by id; raises KeyError for an unknown scheme."""
    try:
        solver = _SOLVERS[scheme]
    except KeyError:
        raise KeyError(f"unknown scheme {scheme!r}; expected one of {ALL_SCHEMES}")
    return solver(inst, cfg)
