"""Associations, power allocations, and the objective-function ingredients.

The network objective is energy efficiency: the sum of per-UE effective
rates (link rate divided by the serving BS's load, i.e. equal time-share
scheduling) over the total consumed power (amplifier + static + backhaul).

Constraint conventions used throughout:
  C1  every UE is served by exactly one BS (structural in the assignment
      vector representation),
  C2  every BS serves at least one UE,
  C3  association variables are binary (structural),
  C4  0 <= p_k <= p_max_k.
"""

from dataclasses import dataclass

import numpy as np

from . import channel


class FeasibilityError(ValueError):
    """A candidate (association, power) violates C1-C4."""


@dataclass
class Association:
    """User-to-BS assignment stored as a length-N vector of BS indices.

    The dense binary matrix is materialized on demand; loads are the
    per-BS user counts.
    """

    assign: np.ndarray
    num_stations: int

    def __post_init__(self):
        self.assign = np.asarray(self.assign, dtype=np.int64)
        if self.assign.ndim != 1:
            raise FeasibilityError("assignment must be a 1-D vector")

    @property
    def num_users(self):
        return self.assign.size

    @property
    def loads(self):
        """y_k = number of UEs served by BS k; shape (K,)."""
        return np.bincount(self.assign, minlength=self.num_stations)

    def x_matrix(self):
        """Dense binary N x K association matrix."""
        x = np.zeros((self.num_users, self.num_stations))
        x[np.arange(self.num_users), self.assign] = 1.0
        return x

    def validate(self):
        """Raise FeasibilityError unless C1-C3 hold."""
        if np.any(self.assign < 0) or np.any(self.assign >= self.num_stations):
            raise FeasibilityError("assignment index out of range")
        loads = self.loads
        if np.any(loads < 1):
            empty = np.flatnonzero(loads < 1).tolist()
            raise FeasibilityError(f"BSs {empty} serve no UE (C2 violated)")

    @classmethod
    def from_matrix(cls, x):
        """Build from a dense binary matrix, checking C1 and C3."""
        x = np.asarray(x)
        if not np.all((x == 0) | (x == 1)):
            raise FeasibilityError("association matrix entries must be 0/1 (C3)")
        if not np.all(x.sum(axis=1) == 1):
            raise FeasibilityError("each UE must connect to exactly one BS (C1)")
        return cls(assign=np.argmax(x, axis=1), num_stations=x.shape[1])

    def copy(self):
        return Association(self.assign.copy(), self.num_stations)

    def __eq__(self, other):
        return (
            isinstance(other, Association)
            and self.num_stations == other.num_stations
            and np.array_equal(self.assign, other.assign)
        )


@dataclass
class PowerAllocation:
    """Per-BS transmit powers in Watts."""

    p: np.ndarray

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=np.float64)

    def validate(self, inst: channel.NetworkInstance):
        """Raise FeasibilityError unless C4 holds."""
        if self.p.shape != (inst.num_stations,):
            raise FeasibilityError("power vector has wrong length")
        if np.any(self.p < 0) or np.any(self.p > inst.p_max):
            raise FeasibilityError("power outside [0, p_max] (C4)")


@dataclass
class MetricBreakdown:
    """Objective components of one (association, power) point."""

    sum_effective_rate: float  # R, Mbps
    access_power: float        # P_an, W
    backhaul_power: float      # P_bh, W
    total_power: float         # P = P_an + P_bh, W
    energy_efficiency: float   # EE = R / P, Mbps/Joule

    def to_dict(self):
        return {
            "sum_effective_rate_mbps": self.sum_effective_rate,
            "access_power_w": self.access_power,
            "backhaul_power_w": self.backhaul_power,
            "total_power_w": self.total_power,
            "energy_efficiency": self.energy_efficiency,
        }


def check_feasible(assoc: Association, power: PowerAllocation, inst):
    """Validate C1-C4 for a candidate solution; raises FeasibilityError."""
    if assoc.num_users != inst.num_users or assoc.num_stations != inst.num_stations:
        raise FeasibilityError("association does not match the instance")
    assoc.validate()
    power.validate(inst)


def effective_rate(n, k, p, assoc: Association, inst):
    """Per-UE effective rate r_nk / y_k in Mbps (equal time share on BS k)."""
    return channel.link_rate(n, k, p, inst) / assoc.loads[k]


def evaluate(assoc: Association, p, inst) -> MetricBreakdown:
    """Full metric breakdown of one feasible (association, power) point."""
    p = np.asarray(p, dtype=np.float64)
    rates = channel.rate_matrix(p, inst)
    n_idx = np.arange(assoc.num_users)
    assigned = rates[n_idx, assoc.assign]
    loads = assoc.loads
    per_bs_rate = np.bincount(assoc.assign, weights=assigned, minlength=inst.num_stations)
    safe_loads = np.maximum(loads, 1)
    r_total = float(np.sum(per_bs_rate / safe_loads))
    p_an = float(inst.varrho @ p) + inst.static_power
    p_bh = float(np.sum(inst.xi * per_bs_rate / safe_loads))
    p_total = p_an + p_bh
    return MetricBreakdown(
        sum_effective_rate=r_total,
        access_power=p_an,
        backhaul_power=p_bh,
        total_power=p_total,
        energy_efficiency=r_total / p_total,
    )


def sum_effective_rate(assoc: Association, p, inst):
    """Network sum effective rate R(x, p) in Mbps."""
    return evaluate(assoc, p, inst).sum_effective_rate


def total_power(assoc: Association, p, inst) -> MetricBreakdown:
    """Power model breakdown: P_an = sum_k varrho_k p_k + P_c and
    P_bh = sum_k xi_k * (per-BS sum of assigned effective rates)."""
    return evaluate(assoc, p, inst)


def energy_efficiency(assoc: Association, p, inst):
    """EE = R / P in Mbps/Joule; well-defined since P >= P_c > 0."""
    return evaluate(assoc, p, inst).energy_efficiency


def parametric_value(assoc: Association, p, q, inst):
    """Weighted rate-minus-power objective used by the subtractive form:

        sum_k sum_n [(1 - q xi_k) / y_k] x_nk r_nk  -  q sum_k varrho_k p_k

    Identity against the power model: this equals R - q (P - P_c).
    """
    p = np.asarray(p, dtype=np.float64)
    rates = channel.rate_matrix(p, inst)
    n_idx = np.arange(assoc.num_users)
    assigned = rates[n_idx, assoc.assign]
    loads = assoc.loads
    per_bs_rate = np.bincount(assoc.assign, weights=assigned, minlength=inst.num_stations)
    safe_loads = np.maximum(loads, 1)
    weighted = float(np.sum((1.0 - q * inst.xi) * per_bs_rate / safe_loads))
    return weighted - q * float(inst.varrho @ p)


def greedy_c2_association(scores) -> Association:
    """Assign each UE to its best-scoring BS, then repair empty BSs.

    Repair moves, for each unserved BS in ascending index, the UE with the
    highest score toward it among UEs currently on BSs with two or more
    users.  Requires N >= K.
    """
    scores = np.asarray(scores)
    n_ue, n_bs = scores.shape
    if n_ue < n_bs:
        raise FeasibilityError("need N >= K to satisfy C2")
    assign = np.argmax(scores, axis=1).astype(np.int64)
    loads = np.bincount(assign, minlength=n_bs)
    for k in range(n_bs):
        if loads[k] >= 1:
            continue
        donors = np.flatnonzero(loads[assign] >= 2)
        n_star = donors[np.argmax(scores[donors, k])]
        loads[assign[n_star]] -= 1
        assign[n_star] = k
        loads[k] += 1
    return Association(assign=assign, num_stations=n_bs)
