import numpy as np
import pytest

from gkdvlab.bounds import size_lifespan
from gkdvlab.diagnostics import (
    CSV_COLUMNS,
    DiagnosticsSample,
    DistanceSeries,
    InsufficientSamplesError,
    collision_time,
    distance,
    fit_linear_growth,
    local_extrema,
    max_then_min,
    peak_separation,
    refine_peak,
    sample,
    size_estimate_monitor,
    track_peak,
    trajectory_slope,
)
from gkdvlab.initial_data import SolitonParams, soliton, two_soliton_sum
from gkdvlab.integrator import SolverRun, iterate
from gkdvlab.models import ModelSpec, PolynomialNonlinearity
from gkdvlab.spectral import Grid, GridMismatchError, RealField, derivative, sobolev_norm


def synthetic(t, y):
    return DistanceSeries([DiagnosticsSample(float(ti), float(yi), float(yi), float(yi), float(yi),
                                             0.0, 0.0, 0.0, 0.0) for ti, yi in zip(t, y)])


class TestDistance:
    def test_identical_fields(self):
        g = Grid(100.0, 512)
        u = soliton(SolitonParams(c=0.3), g)
        d = distance(u, u)
        assert all(v == 0.0 for v in d.norms.values())

    def test_constant_offset(self):
        g = Grid(80.0, 512)
        u = soliton(SolitonParams(c=0.3), g)
        eps = 1e-3
        d = distance(RealField(g, u.values + eps), u)
        assert d.Linf == pytest.approx(eps, rel=1e-9)
        assert d.H0 == pytest.approx(eps * np.sqrt(2 * g.L), rel=1e-9)
        assert d.H1 == pytest.approx(d.H0, rel=1e-9)

    def test_half_cell_translate(self):
        g = Grid(100.0, 2048)
        p = SolitonParams(c=0.3)
        u = soliton(p, g)
        delta = 0.5 * g.dx
        moved = soliton(SolitonParams(c=0.3, x0=delta), g)
        d = distance(moved, u)
        first_order = np.max(np.abs(derivative(u, 1).values)) * delta
        assert d.Linf == pytest.approx(first_order, rel=0.05)

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatchError):
            distance(Grid(10.0, 32).zeros(), Grid(10.0, 64).zeros())

    def test_sample_fields(self):
        g = Grid(100.0, 1024)
        u = soliton(SolitonParams(c=0.2, x0=3.3, family="mkdv"), g)
        s = sample(u, 1.5)
        assert s.t == 1.5
        assert s.H2 == pytest.approx(sobolev_norm(u, 2))
        assert s.peak_x == pytest.approx(3.3, abs=0.02 * g.dx)
        assert s.peak_val == pytest.approx(np.sqrt(1.2), rel=1e-4)
        assert s.row()[0] == 1.5 and len(s.row()) == len(CSV_COLUMNS)


class TestGrowthFit:
    def test_exact_line(self):
        t = np.linspace(0, 10, 41)
        fit = fit_linear_growth(synthetic(t, 0.003 * t), window=(0, 10))
        assert fit.slope["Linf"] == pytest.approx(0.003)
        assert fit.r2["H0"] == pytest.approx(1.0)

    def test_constant_series(self):
        t = np.linspace(0, 10, 41)
        fit = fit_linear_growth(synthetic(t, np.full_like(t, 0.2)))
        assert fit.slope["H1"] == pytest.approx(0.0, abs=1e-15)
        assert fit.window == (0.0, 5.0)

    def test_too_few_samples(self):
        t = np.linspace(0, 1, 8)
        with pytest.raises(InsufficientSamplesError):
            fit_linear_growth(synthetic(t, t))

    def test_times_must_increase(self):
        with pytest.raises(ValueError):
            synthetic([0.0, 1.0, 1.0], [0, 0, 0])

    def test_early_quintic_growth_extrapolates_below_bound(self):
        g = Grid(400.0, 2048)
        U0 = soliton(SolitonParams(c=0.01), g, check=False)
        spec = SolverRun(ModelSpec.power(5), U0, 6.5, 0.05, (), 10)
        samples = []
        for _, t, v in iterate(spec):
            ref = soliton(SolitonParams(c=0.01), g, t=t, check=False).values
            samples.append(sample(RealField(g, ref - v), t))
        fit = fit_linear_growth(DistanceSeries(samples), window=(0, 6.5))
        assert fit.slope["Linf"] > 0
        assert fit.intercept["Linf"] + 80 * fit.slope["Linf"] <= 0.0024


class TestPeaks:
    def test_parabolic_refinement(self):
        x = np.arange(10.0)
        y = -((x - 4.3) ** 2)
        px, pv = refine_peak(x, y, 1.0)
        assert px == pytest.approx(4.3) and pv == pytest.approx(0.0, abs=1e-12)

    def test_soliton_track_on_line(self):
        g = Grid(100.0, 1024)
        p = SolitonParams(c=0.3, x0=-5.0)
        snaps = [(t, soliton(p, g, t)) for t in np.linspace(0, 50, 11)]
        track = track_peak(snaps)
        for t, x, _ in track:
            assert x == pytest.approx(-5.0 + 0.3 * t, abs=1e-3 * g.dx)
        assert trajectory_slope(track) == pytest.approx(0.3, rel=1e-6)

    def test_rescaled_track_slope(self):
        g = Grid(200.0, 2048)
        p = SolitonParams(c=0.4, family="rescaled_kdv", nu=0.47)
        track = track_peak((t, soliton(p, g, t)) for t in np.linspace(0, 100, 21))
        assert trajectory_slope(track) == pytest.approx(0.47 * 0.4, rel=0.01)

    def test_unwrapped_slope_across_boundary(self):
        g = Grid(20.0, 256)
        p = SolitonParams(c=1.0, x0=10.0)
        track = track_peak((t, soliton(p, g, t, check=False)) for t in np.linspace(0, 30, 61))
        assert trajectory_slope(track, g.length) == pytest.approx(1.0, rel=1e-3)


class TestExtrema:
    def test_max_then_min(self):
        t = np.linspace(0, 10, 201)
        y = np.sin(t)
        pair = max_then_min(t, y)
        assert pair[0] == pytest.approx(np.pi / 2, abs=0.05)
        assert pair[1] == pytest.approx(3 * np.pi / 2, abs=0.05)

    def test_monotone_has_no_pattern(self):
        t = np.linspace(0, 10, 101)
        assert max_then_min(t, t**2) is None

    def test_shallow_dip_ignored(self):
        t = np.linspace(0, 10, 201)
        y = 1 + 1e-4 * np.sin(t)
        assert max_then_min(t, y, rel_depth=0.01) is None

    def test_local_extrema_indices(self):
        y = np.array([0, 1, 0, -1, 0, 2, 0])
        mx, mn = local_extrema(y)
        assert list(mx) == [1, 5] and list(mn) == [3]


class TestSizeMonitor:
    def _series(self, values, t):
        return [DiagnosticsSample(ti, v, v, v, v, 0, 0, 0, 0) for ti, v in zip(t, values)]

    def test_kdv_soliton_passes(self):
        g = Grid(100.0, 1024)
        U0 = soliton(SolitonParams(c=0.3), g)
        spec = SolverRun(ModelSpec.kdv(), U0, 5.0, 0.01, (), 10)
        samples = [sample(RealField(g, v), t) for _, t, v in iterate(spec)]
        rep = size_estimate_monitor(samples, 2, sobolev_norm(U0, 2), 5.0)
        assert rep.passed and rep.max_ratio == pytest.approx(1.0, abs=1e-8)

    def test_quintic_within_lifespan(self):
        # full lifespan (~1.1e4 time units); the wide, small wave is resolved on a coarse grid
        g = Grid(400.0, 512)
        U0 = soliton(SolitonParams(c=0.01), g, check=False)
        n0 = sobolev_norm(U0, 2)
        T = size_lifespan(n0, PolynomialNonlinearity.monomial(5))
        assert T > 1e4
        spec = SolverRun(ModelSpec.power(5), U0, T, 0.5, (), 50)
        samples = [sample(RealField(g, v), t) for _, t, v in iterate(spec)]
        rep = size_estimate_monitor(samples, 2, n0, T)
        assert rep.passed and rep.checked_until == pytest.approx(T)

    def test_injected_violation(self):
        t = np.linspace(0, 10, 21)
        vals = np.where(t >= 5.0, 3.0, 1.0)
        rep = size_estimate_monitor(self._series(vals, t), 2, 1.0, 10.0)
        assert not rep.passed and rep.first_violation == 5.0

    def test_only_samples_inside_lifespan_count(self):
        t = np.linspace(0, 10, 21)
        vals = np.where(t >= 5.0, 3.0, 1.0)
        rep = size_estimate_monitor(self._series(vals, t), 2, 1.0, 4.0)
        assert rep.passed and rep.checked_until == 4.0

    def test_short_samples_noted(self):
        rep = size_estimate_monitor(self._series([1.0, 1.0], [0.0, 1.0]), 2, 1.0, 5.0)
        assert rep.passed and rep.notes


class TestCollision:
    def test_separation(self):
        g = Grid(200.0, 2048)
        u = two_soliton_sum("kdv", [(0.08, 40.0), (0.2, 0.0)], g).values
        assert peak_separation(g.x, u) == pytest.approx(40.0, abs=g.dx)
        assert peak_separation(g.x, soliton(SolitonParams(c=0.2), g).values) == 0.0

    def test_closest_approach(self):
        g = Grid(200.0, 2048)
        times = np.linspace(0, 200, 201)
        fields = []
        for t in times:
            a = soliton(SolitonParams(c=0.2, x0=-40.0), g, t).values
            b = soliton(SolitonParams(c=0.2, x0=40.0 - 0.4 * t), g, check=False).values
            fields.append(a + b)
        tc, sep = collision_time(times, fields, g.x)
        # peaks merge around t = 80/0.6; the midpoint of the merged stretch is reported
        assert tc == pytest.approx(80 / 0.6, abs=2.0)
        assert sep.min() == 0.0
