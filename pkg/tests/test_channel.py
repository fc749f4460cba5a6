"""Topology generation, path loss, gains, SINR, and link rates."""

import numpy as np
import pytest

from hetnet_ee import channel

from conftest import make_instance


class TestPathLoss:
    def test_macro_at_1km(self):
        assert channel.path_loss_db(channel.MACRO, 1.0) == pytest.approx(128.1, abs=1e-12)

    def test_small_at_1km(self):
        assert channel.path_loss_db(channel.SMALL, 1.0) == pytest.approx(140.7, abs=1e-12)

    def test_macro_at_100m(self):
        # 128.1 - 37.6 = 90.5 dB
        assert channel.path_loss_db(channel.MACRO, 0.1) == pytest.approx(90.5, abs=1e-9)

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(ValueError):
            channel.path_loss_db(channel.MACRO, 0.0)
        with pytest.raises(ValueError):
            channel.path_loss_db(channel.SMALL, -2.0)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            channel.path_loss_db("femto", 1.0)


class TestChannelGain:
    def test_zero_loss(self):
        assert channel.channel_gain(0.0, 0.0) == 1.0

    def test_shadow_cancellation(self):
        assert channel.channel_gain(10.0, -10.0) == 1.0

    def test_90p5_db(self):
        assert channel.channel_gain(90.5, 0.0) == pytest.approx(8.912509381337441e-10, rel=1e-12)


class TestGenerateTopology:
    def test_default_scenario_shape(self, default_instance):
        inst = default_instance
        assert inst.num_stations == 9
        assert inst.num_users == 240
        assert inst.stations[0].kind == channel.MACRO
        assert inst.stations[0].position == (250.0, 250.0)
        assert all(bs.kind == channel.SMALL for bs in inst.stations[1:])

    def test_default_power_parameters(self, default_instance):
        inst = default_instance
        assert inst.p_max[0] == pytest.approx(10 ** 1.6)   # 46 dBm
        assert inst.p_max[1] == pytest.approx(1.0)         # 30 dBm
        assert inst.static_power == pytest.approx(10.0 + 8 * 0.1)
        assert inst.noise_power == pytest.approx(10 ** (-13.4))
        assert inst.varrho[0] == 4.0 and inst.varrho[1] == 2.0
        assert np.all(inst.xi == 1.0)

    def test_same_seed_is_bit_identical(self):
        params = channel.TopologyParams(num_users=30, num_small_cells=2, rng_seed=7)
        a = channel.generate_topology(params)
        b = channel.generate_topology(params)
        assert np.array_equal(a.gains, b.gains)
        assert all(
            u1.position == u2.position for u1, u2 in zip(a.users, b.users)
        )

    def test_distance_minima_respected(self, default_instance):
        inst = default_instance
        params = channel.TopologyParams()
        ue = np.array([u.position for u in inst.users])
        mbs = np.array(inst.stations[0].position)
        sbs = np.array([bs.position for bs in inst.stations[1:]])
        d_mbs = np.hypot(*(ue - mbs).T)
        assert d_mbs.min() >= params.min_dist_mbs_ue
        for s in sbs:
            assert np.hypot(*(ue - s).T).min() >= params.min_dist_sbs_ue
        dd = np.hypot(ue[:, None, 0] - ue[None, :, 0], ue[:, None, 1] - ue[None, :, 1])
        np.fill_diagonal(dd, np.inf)
        assert dd.min() >= params.min_dist_ue_ue

    def test_zero_users_rejected(self):
        params = channel.TopologyParams(num_users=0)
        with pytest.raises(ValueError):
            channel.generate_topology(params)

    def test_overdense_scenario_fails_placement(self):
        params = channel.TopologyParams(
            area_side=80.0, num_small_cells=0, num_users=10, min_dist_mbs_ue=35.0,
            min_dist_ue_ue=60.0,
        )
        with pytest.raises(channel.PlacementError):
            channel.generate_topology(params)

    def test_gains_positive(self, default_instance):
        assert np.all(default_instance.gains > 0)


class TestSinrAndRate:
    def test_single_cell_sinr(self):
        inst = make_instance([[1e-9]], noise=1e-10)
        assert channel.sinr(0, 0, [1.0], inst) == pytest.approx(10.0, rel=1e-12)

    def test_zero_power_zero_sinr(self):
        inst = make_instance([[1e-9]], noise=1e-10)
        assert channel.sinr(0, 0, [0.0], inst) == 0.0

    def test_symmetric_two_cell(self):
        inst = make_instance([[1e-9, 1e-9], [1e-9, 1e-9]], noise=1e-20)
        assert channel.sinr(0, 0, [1.0, 1.0], inst) == pytest.approx(1.0, rel=1e-9)

    def test_rate_examples(self):
        # gamma = 1 at 10 MHz -> 10 Mbps; gamma = 3 -> 20 Mbps
        inst = make_instance([[1e-10]], noise=1e-10, bandwidth=10e6)
        assert channel.link_rate(0, 0, [1.0], inst) == pytest.approx(10.0, rel=1e-12)
        inst3 = make_instance([[3e-10]], noise=1e-10, bandwidth=10e6)
        assert channel.link_rate(0, 0, [1.0], inst3) == pytest.approx(20.0, rel=1e-12)

    def test_zero_sinr_zero_rate(self):
        inst = make_instance([[1e-9]], noise=1e-10)
        assert channel.link_rate(0, 0, [0.0], inst) == 0.0

    def test_matrix_versions_match_scalar(self):
        rng = np.random.default_rng(3)
        gains = 10.0 ** rng.uniform(-12, -9, (5, 3))
        inst = make_instance(gains)
        p = rng.uniform(0.01, 1.0, 3)
        sinr = channel.sinr_matrix(p, inst)
        rates = channel.rate_matrix(p, inst)
        for n in range(5):
            for k in range(3):
                assert sinr[n, k] == pytest.approx(channel.sinr(n, k, p, inst), rel=1e-12)
                assert rates[n, k] == pytest.approx(channel.link_rate(n, k, p, inst), rel=1e-12)

    def test_sinr_monotonicity(self):
        rng = np.random.default_rng(11)
        gains = 10.0 ** rng.uniform(-12, -9, (4, 3))
        inst = make_instance(gains)
        p = rng.uniform(0.1, 0.9, 3)
        base = channel.sinr(0, 0, p, inst)
        up = p.copy()
        up[0] *= 1.5
        assert channel.sinr(0, 0, up, inst) > base
        interf = p.copy()
        interf[1] *= 1.5
        assert channel.sinr(0, 0, interf, inst) < base


class TestInstanceValidation:
    def test_requires_positive_gains(self):
        with pytest.raises(ValueError):
            make_instance([[0.0]])

    def test_requires_n_ge_k(self):
        with pytest.raises(ValueError):
            make_instance([[1e-9, 1e-9]])  # N=1 < K=2

    def test_with_xi_overrides_all(self, default_instance):
        inst = default_instance.with_xi(8.0)
        assert np.all(inst.xi == 8.0)
        assert np.array_equal(inst.gains, default_instance.gains)
        assert np.all(default_instance.xi == 1.0)  # original untouched

    def test_json_round_trip(self):
        inst = make_instance([[1e-9, 2e-9], [3e-9, 4e-9]], xi=2.5)
        clone = channel.NetworkInstance.from_json_dict(inst.to_json_dict())
        assert np.array_equal(clone.gains, inst.gains)
        assert clone.noise_power == inst.noise_power
        assert clone.bandwidth == inst.bandwidth
        assert clone.static_power == inst.static_power
        assert [bs.xi for bs in clone.stations] == [bs.xi for bs in inst.stations]
