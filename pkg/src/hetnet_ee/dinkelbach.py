"""Outer fractional-programming loop joining the two subproblem solvers.

Energy efficiency R/P is maximized through the classic parametric
reformulation: for a weight q, maximize R - q P by alternating the
association and power-control solvers, then update q to the achieved R/P.
The loop stops once |R - q P| falls below epsilon, at which point q is the
achieved energy efficiency up to epsilon/P.
"""

from dataclasses import dataclass, field

from . import model, pc_solver, ua_solver


@dataclass
class SolverConfig:
    epsilon: float = 1e-3          # |R - q P| stopping tolerance, Mbps
    max_outer: int = 30            # cap on q updates (T3)
    ua: ua_solver.UaConfig = field(default_factory=ua_solver.UaConfig)
    pc: pc_solver.PcConfig = field(default_factory=pc_solver.PcConfig)
    re_bias_macro_db: float = 0.0  # range-expansion association bias
    re_bias_small_db: float = 10.0
    rng_seed: int = 0

    def validate(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        for name, cap in (
            ("max_outer", self.max_outer),
            ("ua.max_iters", self.ua.max_iters),
            ("pc.max_rounds", self.pc.max_rounds),
            ("pc.max_inner", self.pc.max_inner),
        ):
            if cap < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 < self.ua.eta <= 1.0:
            raise ValueError("ua.eta must lie in (0, 1]")
        if not 0.0 < self.pc.p_min_ratio < 1.0:
            raise ValueError("pc.p_min_ratio must lie in (0, 1)")


@dataclass
class IterationDiagnostics:
    ua: ua_solver.UaDiagnostics
    pc: pc_solver.PcDiagnostics


@dataclass
class Solution:
    """Solver output: the point, its metrics, and convergence diagnostics."""

    assoc: model.Association
    power: model.PowerAllocation
    q_star: float
    metrics: model.MetricBreakdown
    q_trace: list
    outer_iterations: int          # T3
    converged: bool
    sub_diagnostics: list = field(default_factory=list)

    def counters(self):
        """Aggregated iteration counters across the outer loop."""
        return {
            "T1": sum(d.ua.iterations for d in self.sub_diagnostics if d.ua),
            "m": sum(d.ua.inner_updates for d in self.sub_diagnostics if d.ua),
            "T2": sum(d.pc.rounds for d in self.sub_diagnostics if d.pc),
            "L": sum(d.pc.inner_iters for d in self.sub_diagnostics if d.pc),
            "T3": self.outer_iterations,
        }

    def to_json_dict(self):
        return {
            "assignment": self.assign_list(),
            "power_w": self.power.p.tolist(),
            "q_star": self.q_star,
            "metrics": self.metrics.to_dict(),
            "q_trace": list(self.q_trace),
            "counters": self.counters(),
            "converged": self.converged,
        }

    def assign_list(self):
        return self.assoc.assign.tolist()


def parametric_objective(assoc: model.Association, p, q, inst):
    """Subtractive objective at weight q (the per-BS backhaul weights fold
    into the rate term; the static power does not appear, so the value
    equals R - q (P - P_c))."""
    return model.parametric_value(assoc, p, q, inst)


def solve(inst, cfg: SolverConfig = None) -> Solution:
    """Alternating association / power-control under the q update rule.

    Each outer iteration warm-starts both subproblems from the previous
    point; an association candidate is kept only if it does not lower the
    parametric objective, which together with the monotone power step
    makes the q sequence strictly increasing until the stop test fires.
    """
    if cfg is None:
        cfg = SolverConfig()
    cfg.validate()

    q = 0.0
    q_trace = []
    assoc = None
    p = inst.p_max.copy()
    sub_diags = []
    best = None  # (q_candidate, assoc, power, metrics)
    converged = False

    for _ in range(cfg.max_outer):
        q_trace.append(q)
        warm = assoc is not None
        cand, _, ua_diag = ua_solver.solve_ua(p, q, inst, cfg.ua, init_assoc=assoc)
        if assoc is None or model.parametric_value(
            cand, p, q, inst
        ) >= model.parametric_value(assoc, p, q, inst):
            assoc = cand
        power, pc_diag = pc_solver.solve_pc(assoc, q, p, inst, cfg.pc, warm=warm)
        p = power.p
        sub_diags.append(IterationDiagnostics(ua=ua_diag, pc=pc_diag))

        metrics = model.evaluate(assoc, p, inst)
        r_val, p_val = metrics.sum_effective_rate, metrics.total_power
        if best is None or r_val / p_val > best[0]:
            best = (r_val / p_val, assoc, power, metrics)
        if abs(r_val - q * p_val) <= cfg.epsilon:
            converged = True
            break
        q = r_val / p_val

    if converged:
        return Solution(
            assoc=assoc,
            power=power,
            q_star=q,
            metrics=metrics,
            q_trace=q_trace,
            outer_iterations=len(q_trace),
            converged=True,
            sub_diagnostics=sub_diags,
        )
    q_best, assoc_b, power_b, metrics_b = best
    return Solution(
        assoc=assoc_b,
        power=power_b,
        q_star=q_best,
        metrics=metrics_b,
        q_trace=q_trace,
        outer_iterations=len(q_trace),
        converged=False,
        sub_diagnostics=sub_diags,
    )
