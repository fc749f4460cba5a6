"""Two-tier network topology generation and per-link channel math.

A scenario is one macro base station at the center of a square coverage
area, a handful of uniformly placed small cells reusing the same spectrum,
and user terminals scattered under minimum-distance constraints.  Channel
gains combine a distance-based path loss (3GPP-style constants, distances
in kilometers) with i.i.d. log-normal shadowing drawn once at generation
time; the topology is static afterwards.
"""

import json
from dataclasses import dataclass, replace

import numpy as np

from . import kernels

MACRO = "macro"
SMALL = "small"

# Rejection-sampling budget per placed node before generation gives up.
MAX_PLACEMENT_ATTEMPTS = 10_000


class PlacementError(RuntimeError):
    """Raised when a node cannot be placed under the distance constraints."""


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class BaseStation:
    """One transmitter: the macro cell or a small cell.

    p_max is the transmit-power cap in Watts, varrho the inverse
    power-amplifier efficiency, xi the dynamic backhaul consumption in
    Watts per Mbps of carried data.
    """

    id: int
    kind: str
    position: tuple
    p_max: float
    varrho: float
    xi: float

    def __post_init__(self):
        if self.kind not in (MACRO, SMALL):
            raise ValueError(f"unknown BS kind {self.kind!r}")
        if self.p_max <= 0:
            raise ValueError("p_max must be positive")
        if self.varrho < 1:
            raise ValueError("varrho must be >= 1")
        if self.xi < 0:
            raise ValueError("xi must be nonnegative")


@dataclass(frozen=True)
class UserEquipment:
    id: int
    position: tuple


@dataclass
class NetworkInstance:
    """Immutable scenario consumed by the solvers.

    gains[n, k] is the linear channel gain between UE n and BS k;
    static_power aggregates the per-station fixed consumption.
    """

    stations: list
    users: list
    gains: np.ndarray
    noise_power: float
    bandwidth: float
    static_power: float

    def __post_init__(self):
        self.gains = np.ascontiguousarray(self.gains, dtype=np.float64)
        K = len(self.stations)
        N = len(self.users)
        if self.gains.shape != (N, K):
            raise ValueError(f"gains shape {self.gains.shape} != ({N}, {K})")
        if N < K:
            raise ValueError(f"need at least as many UEs as BSs (N={N}, K={K})")
        if not np.all(self.gains > 0):
            raise ValueError("all channel gains must be positive")
        if self.noise_power <= 0:
            raise ValueError("noise_power must be positive")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        macros = [bs for bs in self.stations if bs.kind == MACRO]
        if len(macros) != 1 or macros[0].id != 0:
            raise ValueError("exactly one macro BS with id 0 is required")
        if [bs.id for bs in self.stations] != list(range(K)):
            raise ValueError("station ids must be 0..K-1 in order")
        self.p_max = np.array([bs.p_max for bs in self.stations])
        self.varrho = np.array([bs.varrho for bs in self.stations])
        self.xi = np.array([bs.xi for bs in self.stations])

    @property
    def num_stations(self):
        return len(self.stations)

    @property
    def num_users(self):
        return len(self.users)

    @property
    def rate_scale(self):
        """Mbps per log2-unit: bandwidth / 1e6."""
        return self.bandwidth / 1e6

    def with_xi(self, xi):
        """Copy of this instance with every BS's backhaul coefficient set to xi."""
        stations = [replace(bs, xi=float(xi)) for bs in self.stations]
        return NetworkInstance(
            stations=stations,
            users=self.users,
            gains=self.gains,
            noise_power=self.noise_power,
            bandwidth=self.bandwidth,
            static_power=self.static_power,
        )

    def to_json_dict(self):
        return {
            "stations": [
                {
                    "id": bs.id,
                    "kind": bs.kind,
                    "position": list(bs.position),
                    "p_max": bs.p_max,
                    "varrho": bs.varrho,
                    "xi": bs.xi,
                }
                for bs in self.stations
            ],
            "users": [
                {"id": ue.id, "position": list(ue.position)} for ue in self.users
            ],
            "gains": self.gains.tolist(),
            "noise_power": self.noise_power,
            "bandwidth": self.bandwidth,
            "static_power": self.static_power,
        }

    @classmethod
    def from_json_dict(cls, d):
        stations = [
            BaseStation(
                id=s["id"],
                kind=s["kind"],
                position=tuple(s["position"]),
                p_max=s["p_max"],
                varrho=s["varrho"],
                xi=s["xi"],
            )
            for s in d["stations"]
        ]
        users = [
            UserEquipment(id=u["id"], position=tuple(u["position"]))
            for u in d["users"]
        ]
        return cls(
            stations=stations,
            users=users,
            gains=np.array(d["gains"]),
            noise_power=d["noise_power"],
            bandwidth=d["bandwidth"],
            static_power=d["static_power"],
        )

    def save_json(self, path):
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f)

    @classmethod
    def load_json(cls, path):
        with open(path) as f:
            return cls.from_json_dict(json.load(f))


@dataclass
class TopologyParams:
    """Placement parameters; defaults reproduce the reference scenario."""

    area_side: float = 500.0
    num_small_cells: int = 8
    num_users: int = 240
    min_dist_mbs_ue: float = 35.0
    min_dist_sbs_ue: float = 10.0
    min_dist_ue_ue: float = 3.0
    shadowing_std_db: float = 8.0
    rng_seed: int = 1

    def validate(self):
        for name in ("area_side", "min_dist_mbs_ue", "min_dist_sbs_ue", "min_dist_ue_ue"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.shadowing_std_db < 0:
            raise ValueError("shadowing_std_db must be nonnegative")
        if self.num_users < self.num_small_cells + 1:
            raise ValueError(
                f"num_users={self.num_users} < num BSs={self.num_small_cells + 1}; "
                "every BS must be able to serve at least one UE"
            )


@dataclass
class PowerParams:
    """Per-kind power-model parameters (reference-scenario defaults)."""

    macro_p_max_dbm: float = 46.0
    small_p_max_dbm: float = 30.0
    macro_static_w: float = 10.0
    small_static_w: float = 0.1
    macro_varrho: float = 4.0
    small_varrho: float = 2.0
    macro_xi: float = 1.0
    small_xi: float = 1.0
    bandwidth_hz: float = 10e6
    noise_dbm: float = -104.0

    def validate(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")
        for name in ("macro_static_w", "small_static_w", "macro_xi", "small_xi"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("macro_varrho", "small_varrho"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


def path_loss_db(kind, distance_km):
    """Distance-based path loss in dB; distance in kilometers.

    Macro links: 128.1 + 37.6 log10(d).  Small-cell links:
    140.7 + 36.7 log10(d).
    """
    if distance_km <= 0:
        raise ValueError("distance must be positive")
    if kind == MACRO:
        return 128.1 + 37.6 * np.log10(distance_km)
    if kind == SMALL:
        return 140.7 + 36.7 * np.log10(distance_km)
    raise ValueError(f"unknown BS kind {kind!r}")


def channel_gain(pl_db, shadow_db):
    """Linear gain from a path loss and a shadowing sample, both in dB."""
    return 10.0 ** (-(pl_db + shadow_db) / 10.0)


def _min_dist(point, others):
    if len(others) == 0:
        return np.inf
    arr = np.asarray(others)
    return float(np.min(np.hypot(arr[:, 0] - point[0], arr[:, 1] - point[1])))


def generate_topology(params: TopologyParams, power: PowerParams = None) -> NetworkInstance:
    """Draw a random scenario: macro BS at the center, small cells and UEs
    uniform over the square, UEs re-drawn until the minimum-distance
    constraints hold.  Deterministic for a fixed rng_seed.
    """
    if power is None:
        power = PowerParams()
    params.validate()
    power.validate()
    rng = np.random.default_rng(params.rng_seed)
    side = params.area_side
    center = (side / 2.0, side / 2.0)

    stations = [
        BaseStation(
            id=0,
            kind=MACRO,
            position=center,
            p_max=dbm_to_watts(power.macro_p_max_dbm),
            varrho=power.macro_varrho,
            xi=power.macro_xi,
        )
    ]
    sbs_pos = rng.uniform(0.0, side, size=(params.num_small_cells, 2))
    for i in range(params.num_small_cells):
        stations.append(
            BaseStation(
                id=i + 1,
                kind=SMALL,
                position=(float(sbs_pos[i, 0]), float(sbs_pos[i, 1])),
                p_max=dbm_to_watts(power.small_p_max_dbm),
                varrho=power.small_varrho,
                xi=power.small_xi,
            )
        )

    users = []
    ue_positions = []
    for n in range(params.num_users):
        for _ in range(MAX_PLACEMENT_ATTEMPTS):
            cand = rng.uniform(0.0, side, size=2)
            if np.hypot(cand[0] - center[0], cand[1] - center[1]) < params.min_dist_mbs_ue:
                continue
            if params.num_small_cells and _min_dist(cand, sbs_pos) < params.min_dist_sbs_ue:
                continue
            if _min_dist(cand, ue_positions) < params.min_dist_ue_ue:
                continue
            break
        else:
            raise PlacementError(
                f"could not place UE {n} after {MAX_PLACEMENT_ATTEMPTS} attempts; "
                "the scenario is too dense for the distance constraints"
            )
        ue_positions.append(cand)
        users.append(UserEquipment(id=n, position=(float(cand[0]), float(cand[1]))))

    N = params.num_users
    K = len(stations)
    shadows = rng.normal(0.0, params.shadowing_std_db, size=(N, K))
    gains = np.empty((N, K))
    for k, bs in enumerate(stations):
        for n in range(N):
            d_km = (
                np.hypot(
                    users[n].position[0] - bs.position[0],
                    users[n].position[1] - bs.position[1],
                )
                / 1000.0
            )
            gains[n, k] = channel_gain(path_loss_db(bs.kind, d_km), shadows[n, k])

    return NetworkInstance(
        stations=stations,
        users=users,
        gains=gains,
        noise_power=dbm_to_watts(power.noise_dbm),
        bandwidth=power.bandwidth_hz,
        static_power=power.macro_static_w
        + params.num_small_cells * power.small_static_w,
    )


def sinr(n, k, p, inst: NetworkInstance):
    """SINR of UE n served by BS k under transmit powers p (Watts)."""
    p = np.asarray(p, dtype=float)
    s = inst.gains[n] * p
    return s[k] / (inst.noise_power + s.sum() - s[k])


def link_rate(n, k, p, inst: NetworkInstance):
    """Shannon rate of link (n, k) in Mbps."""
    return inst.rate_scale * np.log2(1.0 + sinr(n, k, p, inst))


def sinr_matrix(p, inst: NetworkInstance):
    """SINR of every (UE, BS) pair; shape (N, K)."""
    return kernels.sinr_matrix(inst.gains, np.ascontiguousarray(p, dtype=np.float64), inst.noise_power)


def rate_matrix(p, inst: NetworkInstance):
    """Link rate of every (UE, BS) pair in Mbps; shape (N, K)."""
    return kernels.rate_matrix(
        inst.gains, np.ascontiguousarray(p, dtype=np.float64), inst.noise_power, inst.rate_scale
    )
