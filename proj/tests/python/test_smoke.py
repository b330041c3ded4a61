import math

import numpy as np
import pytest

import hetsched


def random_channel(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2)


def test_principal_angles_of_orthogonal_and_shared_rows():
    a = np.eye(4, dtype=complex)[:2]
    b = np.eye(4, dtype=complex)[2:]
    assert hetsched.principal_angles(a, b) == pytest.approx([math.pi / 2, math.pi / 2])
    assert hetsched.principal_angles(a, a) == pytest.approx([0.0, 0.0], abs=1e-7)
    assert hetsched.chordal_distance(a, b) == pytest.approx(math.sqrt(2))


def test_waterfill_spends_the_budget():
    p = hetsched.waterfill([4.0, 1.0, 0.25], 1.0)
    assert sum(p) == pytest.approx(1.0)
    assert p[0] >= p[1] >= p[2] >= 0.0


def test_bd_capacity_sits_between_bounds():
    rng = np.random.default_rng(3)
    r = hetsched.Realization([random_channel(rng, 2, 6), random_channel(rng, 1, 6), random_channel(rng, 3, 6)])
    assert len(r) == 3
    for pos in range(3):
        b = hetsched.capacity_bounds(r, [0, 1, 2], pos, total_power=100.0)
        assert b["lower"] - 1e-9 <= b["exact"] <= b["upper"] + 1e-9


def test_schedulers_return_feasible_arrangements():
    rng = np.random.default_rng(4)
    r = hetsched.Realization([random_channel(rng, m, 6) for m in (1, 1, 1, 2, 3, 4)])
    for name in ("greedy-selection", "algorithm1-group-min", "algorithm2-dof-max"):
        a = hetsched.schedule(name, r, criterion="selection-simplified", snr_db=30.0)
        for group in a.groups:
            assert sum(r.antennas(k) for k in group) <= 6
    a1 = hetsched.schedule("algorithm1-group-min", r)
    assert sorted(k for g in a1.groups for k in g) == list(range(6))


def test_delta_capacity_is_gain_minus_loss():
    rng = np.random.default_rng(5)
    r = hetsched.Realization([random_channel(rng, m, 8) for m in (1, 2, 1, 2)])
    d = hetsched.delta_capacity(r, 3, [0, 1], hetsched.criterion_snr_scale(40.0, 8))
    assert d["delta"] == pytest.approx(d["c_gain"] - d["c_loss"])


def test_preset_run_is_deterministic():
    spec = hetsched.Experiment.preset("fig7", trials=6, seed=11)
    assert "fig7" in hetsched.preset_names()
    assert spec.run_csv(threads=1) == spec.run_csv(threads=2)
    rows = spec.run()
    assert {row["scheduler"] for row in rows} == {"algorithm1-group-min", "algorithm2-dof-max", "conventional-grouping"}
    assert all(len(row["samples"]) == 6 for row in rows)
    assert rows[0]["outage_capacity"] == pytest.approx(hetsched.outage_quantile(rows[0]["samples"], 0.10))


def test_config_errors_raise():
    with pytest.raises(hetsched.ConfigError):
        hetsched.Experiment.from_config("[scenario]\nbogus = 1\n")
    with pytest.raises(hetsched.ConfigError):
        hetsched.Experiment.preset("fig9")


def test_infeasible_group_raises():
    rng = np.random.default_rng(6)
    r = hetsched.Realization([random_channel(rng, 2, 2), random_channel(rng, 2, 2)])
    with pytest.raises(hetsched.InfeasibleError):
        hetsched.group_capacity(r, [0, 1])


def test_config_round_trip():
    spec = hetsched.Experiment.from_config(
        "[scenario]\ntransmit_antennas = 4\ntrials = 3\n[users]\nrandom = 4\n"
        "[experiment]\nschedulers = greedy-selection\ncriteria = projected-norm\n"
    )
    again = hetsched.Experiment.from_json(spec.to_json())
    assert again.to_json() == spec.to_json()
    assert spec.realization(0).transmit_antennas == 4
