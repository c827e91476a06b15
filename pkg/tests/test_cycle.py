import io
import math

import numpy as np
import pytest

from casotto.cycle import (
    BathPair,
    ConditionWarning,
    adiabatic_engine,
    adiabatic_refrigerator,
    nonadiabatic_engine,
    nonadiabatic_refrigerator,
    power,
    sweep,
    write_sweep_csv,
)
from casotto.quadrature import QuadratureSpec
from casotto.spectrum import CavityConfig
from casotto.trajectory import quintic

SPEC = QuadratureSpec()

pytestmark = pytest.mark.filterwarnings(
    "ignore::casotto.friction.TruncationWarning"
)


def cfg(eps=0.01, K=64, tail_tol=1e-6):
    return CavityConfig(L0=math.pi, epsilon=eps, n_modes=K, tail_tol=tail_tol)


ENGINE_BATHS = BathPair(beta_A=2.0, beta_C=1.0)


class TestBathPair:
    def test_validation(self):
        with pytest.raises(ValueError):
            BathPair(beta_A=1.0, beta_C=2.0)  # A hotter than C
        with pytest.raises(ValueError):
            BathPair(beta_A=1.0, beta_C=0.0)

    def test_ratio_and_carnot(self):
        p = BathPair(2.0, 0.5)
        assert p.ratio == 0.25
        assert p.carnot_efficiency == 0.75


class TestAdiabaticEngine:
    @pytest.mark.parametrize("eps", [0.01, 0.06])
    def test_efficiency_equals_compression_ratio(self, eps):
        report = adiabatic_engine(cfg(eps=eps), ENGINE_BATHS)
        assert abs(report.eta - eps) < 1e-12
        assert report.mode == "engine"

    def test_carnot_matching(self):
        # compression tuned to the bath ratio saturates the Carnot value
        for beta_A, ratio in ((2.0, 0.3), (1.0, 0.83), (3.0, 0.6)):
            baths = BathPair(beta_A, ratio * beta_A)
            report = adiabatic_engine(cfg(eps=1.0 - ratio, K=32), baths)
            assert abs(report.eta - baths.carnot_efficiency) < 1e-12

    def test_equal_occupations_give_zero_heat_and_work(self):
        # beta_C * w(L1) == beta_A * w holds exactly for eps = 0.5, ratio 0.5
        # (binary-exact arithmetic), so the occupation differences vanish
        # term by term
        report = adiabatic_engine(cfg(eps=0.5), BathPair(2.0, 1.0))
        assert report.Q == 0.0
        assert report.W == 0.0
        assert not report.eta_defined

    def test_equal_baths_only_consume_work(self):
        # equal temperatures put the machine outside the engine window: the
        # compressed-cavity occupations are lower, so heat and work are both
        # negative
        with pytest.warns(ConditionWarning):
            report = adiabatic_engine(cfg(eps=0.5), BathPair(1.0, 1.0))
        assert report.Q < 0.0
        assert report.W < 0.0
        assert report.mode == "dissipator"

    def test_condition_warning_outside_engine_window(self):
        with pytest.warns(ConditionWarning):
            adiabatic_engine(cfg(eps=0.4), BathPair(1.0, 0.9))

    def test_engine_convention_relations(self):
        report = adiabatic_engine(cfg(eps=0.05, K=48), ENGINE_BATHS)
        assert report.Q == pytest.approx(report.E_C - report.E_B, rel=1e-12)
        assert report.W == pytest.approx(
            (report.E_A - report.E_B) + (report.E_C - report.E_D), rel=1e-12
        )

    def test_casimir_toggle_leaves_heat_and_work_bitwise(self):
        a = adiabatic_engine(cfg(), ENGINE_BATHS, include_casimir=True)
        b = adiabatic_engine(cfg(), ENGINE_BATHS, include_casimir=False)
        assert a.Q == b.Q and a.W == b.W
        assert a.E_A != b.E_A  # the offsets do land in the stroke energies


class TestAdiabaticRefrigerator:
    def test_cop_identity(self):
        report = adiabatic_refrigerator(cfg(eps=0.06), BathPair(2.0, 1.9))
        assert abs(report.eta - (1.0 / 0.06 - 1.0)) < 1e-12
        assert report.eta == pytest.approx(15.6666666666667, rel=1e-10)
        assert report.mode == "refrigerator"

    def test_boundary_saturation_gives_zero_heat(self):
        report = adiabatic_refrigerator(cfg(eps=0.5), BathPair(2.0, 1.0))
        assert report.Q == 0.0

    def test_condition_warning(self):
        with pytest.warns(ConditionWarning):
            adiabatic_refrigerator(cfg(eps=0.06), BathPair(2.0, 1.0))


class TestNonadiabaticEngine:
    def test_large_tau_recovers_adiabatic(self):
        ad = adiabatic_engine(cfg(K=32), ENGINE_BATHS)
        na = nonadiabatic_engine(cfg(K=32), ENGINE_BATHS, quintic(60.0), SPEC)
        assert na.eta == pytest.approx(ad.eta, abs=1e-8)
        assert na.Q == pytest.approx(ad.Q, rel=1e-9)
        assert na.W == pytest.approx(ad.W, rel=1e-7)

    def test_efficiency_below_adiabatic(self):
        report = nonadiabatic_engine(cfg(K=32), ENGINE_BATHS, quintic(1.0), SPEC)
        assert report.eta < report.eta_adiabatic
        assert report.mode == "engine"
        assert report.E_F_A > 0 and report.E_F_C > 0

    def test_sudden_stroke_kills_the_engine(self):
        report = nonadiabatic_engine(cfg(K=48), ENGINE_BATHS, quintic(0.05), SPEC)
        assert report.W < 0
        assert report.mode == "dissipator"

    def test_second_order_efficiency_converges_cubically(self):
        # halving eps shrinks |eta_exact - eta_second_order| about 8x (the
        # residual is cubic in eps once the friction is a small fraction of
        # the heat, hence the moderate stroke time)
        diffs = []
        for eps in (0.04, 0.02, 0.01):
            r = nonadiabatic_engine(cfg(eps=eps, K=24), ENGINE_BATHS, quintic(3.0), SPEC)
            diffs.append(abs(r.eta - r.eta_second_order))
        assert diffs[0] / diffs[1] == pytest.approx(8.0, rel=0.25)
        assert diffs[1] / diffs[2] == pytest.approx(8.0, rel=0.25)

    def test_hot_friction_uses_reversed_stroke(self):
        r = nonadiabatic_engine(cfg(K=24), ENGINE_BATHS, quintic(1.0), SPEC)
        assert r.q_convention.startswith("Q = Q_adiabatic - E_F(cold")

    def test_engine_convention_relations_with_friction(self):
        r = nonadiabatic_engine(cfg(K=24), ENGINE_BATHS, quintic(1.0), SPEC)
        assert r.Q == pytest.approx(r.E_C - r.E_B, rel=1e-12)
        assert r.W == pytest.approx(
            (r.E_A - r.E_B) + (r.E_C - r.E_D), rel=1e-12
        )

    def test_efficiency_ordering_in_tau(self):
        taus = [0.5, 1.0, 2.0, 4.0, 8.0]
        etas = [
            nonadiabatic_engine(cfg(K=24), ENGINE_BATHS, quintic(t), SPEC).eta
            for t in taus
        ]
        assert all(a <= b + 1e-14 for a, b in zip(etas, etas[1:]))
        assert etas[-1] <= 0.01 + 1e-12


class TestNonadiabaticRefrigerator:
    BATHS = BathPair(2.0, 1.9)

    def test_cop_below_adiabatic(self):
        r = nonadiabatic_refrigerator(cfg(eps=0.06, K=32), self.BATHS, quintic(2.0), SPEC)
        assert r.eta <= r.eta_adiabatic
        assert r.mode == "refrigerator"

    def test_sudden_stroke_stops_cooling(self):
        r = nonadiabatic_refrigerator(cfg(eps=0.06, K=48), self.BATHS, quintic(0.05), SPEC)
        assert r.Q < 0
        assert r.mode == "dissipator"

    def test_slow_limit_recovers_adiabatic(self):
        ad = adiabatic_refrigerator(cfg(eps=0.06, K=32), self.BATHS)
        na = nonadiabatic_refrigerator(cfg(eps=0.06, K=32), self.BATHS, quintic(80.0), SPEC)
        assert na.eta == pytest.approx(ad.eta, rel=1e-6)

    def test_cop_improves_with_similar_baths(self):
        cops = []
        for ratio in (0.95, 0.97, 0.99):
            baths = BathPair(2.0, 2.0 * ratio)
            r = nonadiabatic_refrigerator(cfg(eps=0.06, K=32), baths, quintic(3.0), SPEC)
            cops.append(r.eta)
        assert cops[0] < cops[1] < cops[2]


class TestPower:
    def test_adiabatic_scaling(self):
        r = adiabatic_engine(cfg(K=32), ENGINE_BATHS)
        assert power(r, 2.0) == pytest.approx(r.W / 4.0)
        assert power(r, 4.0) == pytest.approx(power(r, 2.0) / 2.0)

    def test_thermalization_time_charged(self):
        r = adiabatic_engine(cfg(K=32), ENGINE_BATHS)
        assert power(r, 1.0, thermalization_time=2.0) == pytest.approx(r.W / 4.0)

    def test_zero_work_zero_power(self):
        r = adiabatic_engine(cfg(eps=0.5), BathPair(2.0, 1.0))
        assert r.W == 0.0
        assert power(r, 1.0) == 0.0

    def test_validation(self):
        r = adiabatic_engine(cfg(K=16), ENGINE_BATHS)
        with pytest.raises(ValueError):
            power(r, 0.0)
        with pytest.raises(ValueError):
            power(r, 1.0, thermalization_time=-1.0)


class TestSweep:
    def test_single_cell_matches_direct_call(self):
        rows = sweep(cfg(K=16), [ENGINE_BATHS], [1.0], quintic, SPEC)
        direct = nonadiabatic_engine(cfg(K=16), ENGINE_BATHS, quintic(1.0), SPEC)
        assert len(rows) == 1
        assert rows[0].report.eta == direct.eta
        assert rows[0].report.W == direct.W

    def test_epsilon_reuse_is_consistent(self):
        rows = sweep(
            cfg(K=16), [ENGINE_BATHS], [1.0], quintic, SPEC, epsilons=[0.01, 0.02]
        )
        by_eps = {r.epsilon: r.report for r in rows}
        assert by_eps[0.02].E_F_A == pytest.approx(4.0 * by_eps[0.01].E_F_A, rel=1e-12)

    def test_row_order_and_grid_shape(self):
        baths = [BathPair(2.0, 0.4), BathPair(2.0, 1.0)]
        rows = sweep(cfg(K=8), baths, [2.0, 0.5, 1.0], quintic, SPEC)
        assert [r.beta_ratio for r in rows] == [0.2, 0.2, 0.2, 0.5, 0.5, 0.5]
        assert [r.tau_omega1 for r in rows] == [0.5, 1.0, 2.0, 0.5, 1.0, 2.0]

    def test_parallel_matches_serial(self):
        baths = [ENGINE_BATHS]
        taus = [0.5, 1.0, 2.0]
        serial = sweep(cfg(K=12), baths, taus, quintic, SPEC, jobs=1)
        parallel = sweep(cfg(K=12), baths, taus, quintic, SPEC, jobs=4)
        for a, b in zip(serial, parallel):
            assert a.report.W == b.report.W
            assert a.report.eta == b.report.eta

    def test_cell_failure_is_recorded_not_raised(self):
        def broken(tau):
            raise RuntimeError("boom")

        rows = sweep(cfg(K=8), [ENGINE_BATHS], [1.0], broken, SPEC)
        assert len(rows) == 1
        assert rows[0].report is None
        assert "boom" in rows[0].error

    def test_csv_shape(self):
        rows = sweep(cfg(K=8), [ENGINE_BATHS], [0.5, 1.0], quintic, SPEC)
        buf = io.StringIO()
        write_sweep_csv(rows, buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0].startswith("tau_omega1,beta_ratio,epsilon,Q,W,eta")
        assert len(lines) == 3
        assert len(lines[1].split(",")) == 12

    def test_validation(self):
        with pytest.raises(ValueError):
            sweep(cfg(K=8), [], [1.0], quintic, SPEC)
        with pytest.raises(ValueError):
            sweep(cfg(K=8), [ENGINE_BATHS], [1.0], quintic, SPEC, machine="laser")


class TestCasimirCancellation:
    def test_nonadiabatic_toggle_bitwise(self):
        on = nonadiabatic_engine(cfg(K=16), ENGINE_BATHS, quintic(1.0), SPEC,
                                 include_casimir=True)
        off = nonadiabatic_engine(cfg(K=16), ENGINE_BATHS, quintic(1.0), SPEC,
                                  include_casimir=False)
        assert on.Q == off.Q
        assert on.W == off.W
        assert on.eta == off.eta
        assert on.E_A != off.E_A
