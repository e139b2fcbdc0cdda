import math
import random

import pytest

from spinpart import (
    Configuration,
    boltzmann_ratio,
    choose_scale,
    generate,
    geometric_schedule,
    ground_eigenspace,
    ground_energy_via_limit,
    log_partition,
    mean_energy,
    spectrum,
    thermo_curve,
)

from conftest import make_instance

LN2 = math.log(2.0)


def two_level():
    """Weights [1, 1]: energies {0: 2, 4: 2}, everything closed-form."""
    return spectrum(make_instance(1, 1))


class TestLogPartition:
    def test_single_weight_closed_form(self):
        spec = spectrum(make_instance(1))
        for beta in (1e-6, 0.25, 1.0, 17.0, 300.0):
            assert log_partition(spec, beta) == pytest.approx(LN2 - beta, abs=1e-12)

    def test_beta_zero_is_n_ln2(self):
        for n, bits, seed in ((1, 1, 0), (5, 8, 3), (12, 20, 9)):
            spec = spectrum(generate(n, bits, seed))
            assert log_partition(spec, 0.0) == pytest.approx(n * LN2, abs=1e-12)

    def test_two_level_value(self):
        # Independent evaluation: Z = 2 + 2 exp(-4), checked to 12+ digits.
        want = math.log(2.0 + 2.0 * math.exp(-4.0))
        assert log_partition(two_level(), 1.0) == pytest.approx(want, abs=1e-12)
        assert f"{want:.4f}" == "0.7113"

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            log_partition(two_level(), -0.1)

    def test_scale_equivalence(self):
        # Dividing energies by c equals evaluating at beta/c.
        spec = spectrum(generate(8, 12, 4))
        for beta in (0.5, 3.0):
            assert log_partition(spec, beta, scale=16) == pytest.approx(
                log_partition(spec, beta / 16), rel=1e-12
            )


class TestMeanEnergy:
    def test_constant_spectrum(self):
        spec = spectrum(make_instance(1))
        for beta in (0.0, 0.5, 10.0):
            assert mean_energy(spec, beta) == pytest.approx(1.0, abs=1e-12)

    def test_beta_zero_is_spectrum_mean(self):
        assert mean_energy(two_level(), 0.0) == pytest.approx(2.0, abs=1e-12)
        spec = spectrum(generate(9, 10, 2))
        want = sum(e * g for e, g in spec.items) / 2**9
        assert mean_energy(spec, 0.0) == pytest.approx(want, rel=1e-12)

    def test_two_level_value(self):
        want = 4.0 * math.exp(-4.0) / (1.0 + math.exp(-4.0))
        assert mean_energy(two_level(), 1.0) == pytest.approx(want, abs=1e-13)
        assert f"{want:.4f}" == "0.0719"

    def test_monotone_in_beta(self):
        inst = generate(10, 16, 6)
        spec = spectrum(inst)
        scale = choose_scale(spec, 1e3, inst.max_weight**2)
        values = [mean_energy(spec, 1.0 / t, scale) for t in geometric_schedule()]
        for hot, cold in zip(values, values[1:]):
            assert cold <= hot + 1e-9

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            mean_energy(two_level(), -1.0)


class TestBoltzmannRatio:
    def test_equal_configurations(self):
        inst = generate(6, 8, 1)
        k = Configuration(0b101, 6)
        assert boltzmann_ratio(inst, k, k, 2.5) == 1.0

    def test_two_level_example(self):
        inst = make_instance(1, 1)
        k = Configuration.from_signs((1, 1))
        m = Configuration.from_signs((1, -1))
        assert boltzmann_ratio(inst, k, m, 1.0) == pytest.approx(math.exp(-4.0), rel=1e-12)
        assert boltzmann_ratio(inst, m, k, 1.0) == pytest.approx(math.exp(4.0), rel=1e-12)

    def test_hot_limit_near_one(self):
        # beta far below the inverse energy scale: all ratios collapse to 1
        inst = generate(8, 16, 5)
        beta = 1e-6 / (inst.total**2)
        rnd = random.Random(0)
        for _ in range(20):
            k = Configuration(rnd.getrandbits(8), 8)
            m = Configuration(rnd.getrandbits(8), 8)
            assert boltzmann_ratio(inst, k, m, beta) == pytest.approx(1.0, abs=1e-5)

    def test_dimension_mismatch(self):
        inst = make_instance(1, 1)
        with pytest.raises(ValueError):
            boltzmann_ratio(inst, Configuration(0, 3), Configuration(0, 2), 1.0)


class TestGroundEnergyViaLimit:
    def test_single_weight_closed_form(self):
        spec = spectrum(make_instance(1))
        res = ground_energy_via_limit(spec, geometric_schedule(10.0, 0.01, 30))
        assert res.estimate == pytest.approx(1.0 - 0.01 * LN2, abs=1e-12)
        assert res.bracket_low <= res.estimate <= res.bracket_high

    def test_two_level_bracket(self):
        res = ground_energy_via_limit(two_level(), geometric_schedule(10.0, 0.01, 30))
        assert res.estimate == pytest.approx(-0.01 * LN2, abs=1e-9)
        assert res.bracket_low == pytest.approx(-0.01 * 2 * LN2)
        assert res.bracket_high == 0.0
        assert res.bracket_low <= res.estimate <= res.bracket_high

    def test_converges_to_brute_force_minimum(self):
        rnd = random.Random(21)
        for _ in range(10):
            inst = generate(rnd.randint(2, 12), rnd.choice([3, 8]), rnd.getrandbits(64))
            spec = spectrum(inst)
            e_min, _ = ground_eigenspace(inst)
            res = ground_energy_via_limit(spec, geometric_schedule())
            assert e_min - 1e-3 * inst.n * LN2 - 1e-9 <= res.estimate <= e_min + 1e-9

    def test_converged_flag(self):
        spec = spectrum(make_instance(3, 1, 1))
        tight = ground_energy_via_limit(spec, (1.0, 1e-6, 9.9e-7), tol=1e-3)
        assert tight.converged
        loose = ground_energy_via_limit(spec, (10.0, 1.0), tol=1e-9)
        assert not loose.converged

    def test_schedule_validation(self):
        spec = two_level()
        with pytest.raises(ValueError):
            ground_energy_via_limit(spec, ())
        with pytest.raises(ValueError):
            ground_energy_via_limit(spec, (0.1, 0.1))
        with pytest.raises(ValueError):
            ground_energy_via_limit(spec, (0.1, 0.5))
        with pytest.raises(ValueError):
            ground_energy_via_limit(spec, (1.0, -0.5))


class TestThermoCurve:
    def test_single_weight_rows(self):
        spec = spectrum(make_instance(1))
        curve = thermo_curve(spec, (1.0, 0.5))
        assert [r.log_z for r in curve.rows] == pytest.approx([LN2 - 1.0, LN2 - 2.0])
        assert [r.temperature for r in curve.rows] == [1.0, 0.5]

    def test_free_le_mean_everywhere(self):
        rnd = random.Random(22)
        for _ in range(8):
            inst = generate(rnd.randint(2, 10), rnd.choice([4, 10]), rnd.getrandbits(64))
            spec = spectrum(inst)
            scale = choose_scale(spec, 1e3, inst.max_weight**2)
            curve = thermo_curve(spec, geometric_schedule(), scale=scale)
            for row in curve.rows:
                assert row.free_e <= row.mean_e + 1e-9
                assert row.free_e == -row.temperature * row.log_z

    def test_two_level_extremes(self):
        curve = thermo_curve(two_level(), (100.0, 0.01))
        hot, cold = curve.rows
        assert hot.mean_e == pytest.approx(4.0 * math.exp(-0.04) / (1 + math.exp(-0.04)), rel=1e-12)
        assert hot.mean_e == pytest.approx(1.96, abs=0.01)
        assert cold.mean_e == pytest.approx(0.0, abs=1e-12)


class TestScaleChoice:
    def test_trigger(self):
        inst = generate(10, 20, 1)
        spec = spectrum(inst)
        assert choose_scale(spec, 1000.0, inst.max_weight**2) == inst.max_weight**2
        hot_beta = 1.0 / spec.max_energy  # beta*E_max = 1, far below the threshold
        assert choose_scale(spec, hot_beta, inst.max_weight**2) == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            choose_scale(two_level(), 1.0, 0)
        with pytest.raises(ValueError):
            log_partition(two_level(), 1.0, scale=-3)


def test_geometric_schedule_shape():
    sched = geometric_schedule()
    assert len(sched) == 40
    assert sched[0] == 10.0 and sched[-1] == 1e-3
    assert all(a > b for a, b in zip(sched, sched[1:]))
    with pytest.raises(ValueError):
        geometric_schedule(1.0, 2.0, 10)
    with pytest.raises(ValueError):
        geometric_schedule(1.0, 0.1, 1)
