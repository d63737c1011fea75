import pytest

from src.config import QUADRATURE_RTOL, ROUNDTRIP_RTOL
from src.models import Dealias, EvolutionTrace, GrowthReport, GrowthRow, PicardConfig, SolverConfig, TraceRecord
from src.nls import evolve
from src.picard import growth_experiment
from src.validation import (
    sanity_check_agreement,
    sanity_check_growth,
    sanity_check_quadrature,
    sanity_check_trace,
    validate_lattice,
    validate_picard,
    validate_solver_config,
    validate_sweep,
)


class TestInputValidation:

    def test_lattice_ok(self):
        result = validate_lattice(16, 256, "both")
        assert result == {"valid": True, "errors": [], "warnings": []}

    @pytest.mark.parametrize("N, bound, method, fragment", [
        (0, 1, "brute", "positive"),
        (4, -1, "brute", "non-negative"),
        (4, 4, "sieve", "Unknown counting method"),
    ])
    def test_lattice_errors(self, N, bound, method, fragment):
        result = validate_lattice(N, bound, method)
        assert not result["valid"]
        assert any(fragment in e for e in result["errors"])

    def test_lattice_empty_levels_warn(self):
        result = validate_lattice(4, 20, "divisor")
        assert result["valid"]
        assert "empty" in result["warnings"][0]

    @pytest.mark.parametrize("N_list, trials, fragment", [
        ([], 1, "empty"),
        ([0, 4], 1, "positive"),
        ([4, 4], 1, "repeated"),
        ([4, 8], 0, "trials"),
    ])
    def test_sweep_errors(self, N_list, trials, fragment):
        result = validate_sweep(N_list, trials)
        assert not result["valid"]
        assert any(fragment in e for e in result["errors"])

    def test_single_N_warns_about_slope(self):
        assert "NaN" in validate_sweep([8], 2)["warnings"][0]
        assert validate_sweep([8], 2, needs_fit=False)["warnings"] == []

    def test_picard(self):
        assert validate_picard([4, 8], PicardConfig(t=1.0))["valid"]
        result = validate_picard([4, 8], PicardConfig(t=0.0, mu=2.0))
        assert not result["valid"]
        assert any("mu=2.0" in w for w in result["warnings"])

    def test_solver_config(self, make_field):
        cfg = SolverConfig(M=16, dt=1e-3, T_end=0.01)
        assert validate_solver_config(cfg, make_field(4, amplitude=0.01))["valid"]
        assert not validate_solver_config(cfg, make_field(9))["valid"]
        assert not validate_solver_config(SolverConfig(M=16, dt=3e-3, T_end=0.01))["valid"]

    def test_solver_config_warnings(self, make_field):
        cfg = SolverConfig(M=16, dt=0.1, T_end=0.1, dealias=Dealias.NONE)
        result = validate_solver_config(cfg, make_field(4))
        assert result["valid"]
        assert any("aliases" in w for w in result["warnings"])
        assert any("reduce dt" in w for w in result["warnings"])


class TestSanityChecks:

    def test_clean_trace(self, make_field):
        cfg = SolverConfig(M=16, dt=1e-3, T_end=0.01, dealias=Dealias.NONE)
        _, trace = evolve(make_field(2, amplitude=0.3), cfg)
        result = sanity_check_trace(trace, cfg)
        assert result["status"] == "ok"
        assert result["details"]["records"] == 11

    def test_mass_drift_flagged(self):
        cfg = SolverConfig(M=8, dt=0.1, T_end=0.1)
        trace = EvolutionTrace(records=[
            TraceRecord(t=0.0, mass=1.0, energy=1.0, l2=1.0, hs=1.0, l4=1.0),
            TraceRecord(t=0.1, mass=0.9, energy=1.0, l2=0.95, hs=1.0, l4=1.0, truncated_mass=0.05),
        ])
        result = sanity_check_trace(trace, cfg)
        assert result["status"] == "uncertain"
        assert result["details"]["mass_drift"] == pytest.approx(0.05)

    def test_empty_trace(self):
        result = sanity_check_trace(EvolutionTrace(), SolverConfig(M=8, dt=0.1, T_end=0.0))
        assert result["status"] == "error"

    def test_growth_slope(self):
        report = growth_experiment([64, 128, 256, 512], PicardConfig(t=1.0, s=0.25))
        assert sanity_check_growth(report)["status"] == "ok"

    def test_growth_without_fit(self):
        row = GrowthRow(N=4, s=0.0, t=1.0, hs_norm=1.0, ratio_to_N1plus_s=1.0, ratio_to_N3s=1.0, projected_hs_norm=1.0)
        report = GrowthReport(rows=[row], slopes={}, residuals={})
        assert sanity_check_growth(report)["status"] == "uncertain"

    def test_growth_deviation(self):
        row = GrowthRow(N=4, s=0.0, t=1.0, hs_norm=1.0, ratio_to_N1plus_s=1.0, ratio_to_N3s=1.0, projected_hs_norm=1.0)
        report = GrowthReport(rows=[row], slopes={"hs_norm": 0.9}, residuals={"hs_norm": 0.0})
        result = sanity_check_growth(report)
        assert result["status"] == "warning"
        assert result["details"]["deviation"] == pytest.approx(-0.1)

    @pytest.mark.parametrize("gap, status", [(0.0, "ok"), (ROUNDTRIP_RTOL, "ok"), (1e-6, "warning"), (float("nan"), "error")])
    def test_agreement(self, gap, status):
        result = sanity_check_agreement(gap, "Both norms")
        assert result["status"] == status
        assert result["details"]["tolerance"] == ROUNDTRIP_RTOL

    def test_quadrature_uses_looser_tolerance(self):
        assert sanity_check_quadrature(1e-10)["status"] == "ok"
        assert sanity_check_agreement(1e-10, "Both norms")["status"] == "warning"
        assert sanity_check_quadrature(10 * QUADRATURE_RTOL)["details"]["tolerance"] == QUADRATURE_RTOL
