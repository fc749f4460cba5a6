"""Shared fixtures and instance builders for the test suite."""

import numpy as np
import pytest

from hetnet_ee import channel


def make_instance(
    gains,
    p_max=1.0,
    varrho=2.0,
    xi=1.0,
    noise=1e-13,
    bandwidth=10e6,
    static_power=10.0,
):
    """Hand-built instance: BS 0 is the macro, the rest are small cells.

    Scalar p_max / varrho / xi broadcast over stations; positions are
    placeholders (the gain matrix is given directly).
    """
    gains = np.asarray(gains, dtype=np.float64)
    n_ue, n_bs = gains.shape
    p_max = np.broadcast_to(np.asarray(p_max, dtype=float), (n_bs,))
    varrho = np.broadcast_to(np.asarray(varrho, dtype=float), (n_bs,))
    xi = np.broadcast_to(np.asarray(xi, dtype=float), (n_bs,))
    stations = [
        channel.BaseStation(
            id=k,
            kind=channel.MACRO if k == 0 else channel.SMALL,
            position=(float(100 * k), 0.0),
            p_max=float(p_max[k]),
            varrho=float(varrho[k]),
            xi=float(xi[k]),
        )
        for k in range(n_bs)
    ]
    users = [channel.UserEquipment(id=n, position=(float(n), 50.0)) for n in range(n_ue)]
    return channel.NetworkInstance(
        stations=stations,
        users=users,
        gains=gains,
        noise_power=noise,
        bandwidth=bandwidth,
        static_power=static_power,
    )


def random_instance(seed, n_ue=6, n_bs=3, p_max=1.0, xi=1.0, noise=1e-13, **kw):
    """Small random instance with gains spread over a few decades."""
    rng = np.random.default_rng(seed)
    gains = 10.0 ** rng.uniform(-12.0, -8.0, size=(n_ue, n_bs))
    return make_instance(gains, p_max=p_max, xi=xi, noise=noise, **kw)


@pytest.fixture(scope="session")
def default_instance():
    """Reference scenario (K=9, N=240), generated once per session."""
    return channel.generate_topology(channel.TopologyParams())
