import numpy as np
import pytest

from gkdvlab.diagnostics import sample
from gkdvlab.initial_data import SolitonParams, soliton
from gkdvlab.integrator import SolverRun, TimeStepper, default_dt, iterate, run, schedule, step
from gkdvlab.models import BlowUpError, ModelSpec
from gkdvlab.spectral import Grid, RealField


def kdv_run(c=0.3, L=100.0, N=512, t_end=1.0, dt=0.05):
    g = Grid(L, N)
    U0 = soliton(SolitonParams(c=c), g)
    return run(SolverRun(ModelSpec.kdv(), U0, t_end, dt), sampler=lambda t, v: None)


def test_near_linear_regime_matches_airy_propagator():
    g = Grid(30.0, 256)
    U0 = RealField(g, 1e-8 * np.exp(-(g.x**2)))
    dt = 0.05
    # cubic nonlinearity: at amplitude 1e-8 its contribution is ~1e-24, far below the tolerance
    m = ModelSpec.power(3)
    out = step(TimeStepper(g, m, dt), m, U0)
    exact = np.fft.irfft(np.exp(1j * g.xi_r**3 * dt) * np.fft.rfft(U0.values), n=g.n_points)
    assert np.max(np.abs(out.values - exact)) <= 1e-12 * np.max(np.abs(exact))


def test_zero_field_is_fixed_point():
    g = Grid(20.0, 64)
    res = run(SolverRun(ModelSpec.power(3), g.zeros(), 1.0, 0.1))
    assert np.all(res.final.values == 0.0)


def test_richardson_global_order():
    fine = kdv_run(dt=0.0125).final.values
    errs = [np.max(np.abs(kdv_run(dt=h).final.values - fine)) for h in (0.1, 0.05, 0.025)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 3.6) & (orders < 4.6)), orders


def test_one_step_local_order():
    g = Grid(100.0, 512)
    U0 = soliton(SolitonParams(c=0.3), g)
    m = ModelSpec.kdv()
    errs = []
    for h in (0.2, 0.1):
        exact = soliton(SolitonParams(c=0.3), g, t=h).values
        errs.append(np.max(np.abs(step(TimeStepper(g, m, h), m, U0).values - exact)))
    assert 24 < errs[0] / errs[1] < 40  # ~2^5


def test_time_reversal():
    g = Grid(60.0, 512)
    U0 = soliton(SolitonParams(c=0.5, x0=-10.0), g)
    m = ModelSpec.gkdv([1.0, 0.0, 0.02])
    fwd, bwd = TimeStepper(g, m, 0.02), TimeStepper(g, m, -0.02)
    U = U0
    for _ in range(100):
        U = step(fwd, m, U)
    for _ in range(100):
        U = step(bwd, m, U)
    assert np.max(np.abs(U.values - U0.values)) < 1e-8


def test_zero_horizon():
    g = Grid(100.0, 256)
    U0 = soliton(SolitonParams(c=0.3), g)
    res = run(SolverRun(ModelSpec.kdv(), U0, 0.0, 0.1, snapshot_times=[0.0]))
    assert len(res.snapshots) == 1
    np.testing.assert_array_equal(res.snapshots[0][1].values, U0.values)
    np.testing.assert_array_equal(res.final.values, U0.values)


def test_peak_travels_at_soliton_speed():
    g = Grid(100.0, 1024)
    U0 = soliton(SolitonParams(c=0.4), g)
    res = run(SolverRun(ModelSpec.kdv(), U0, 25.0, 0.02))
    assert res.samples[-1].peak_x == pytest.approx(10.0, abs=g.dx)


def test_mkdv_mass_drift():
    g = Grid(100.0, 512)
    U0 = soliton(SolitonParams(c=0.2, family="mkdv"), g)
    res = run(SolverRun(ModelSpec.mkdv(), U0, 100.0, 0.02, diagnostics_stride=50))
    mass = np.array([s.mass for s in res.samples])
    assert np.max(np.abs(mass - mass[0])) <= 1e-10 * abs(mass[0])


def test_deterministic():
    a, b = kdv_run(), kdv_run()
    np.testing.assert_array_equal(a.final.values, b.final.values)


def test_schedule_lands_on_horizon():
    g = Grid(10.0, 32)
    dt, n, diag, snaps = schedule(SolverRun(ModelSpec.kdv(), g.zeros(), 1.0, 0.3, [0.5], 2))
    assert n == 3 and dt == pytest.approx(1.0 / 3.0)
    assert diag == {0, 2, 3}
    assert snaps == {2}


def test_snapshot_times_validated():
    g = Grid(10.0, 32)
    with pytest.raises(ValueError):
        SolverRun(ModelSpec.kdv(), g.zeros(), 1.0, 0.1, [2.0])
    with pytest.raises(ValueError):
        SolverRun(ModelSpec.kdv(), g.zeros(), -1.0, 0.1)
    with pytest.raises(ValueError):
        TimeStepper(g, ModelSpec.kdv(), 0.0)


def test_blow_up_reported_with_last_valid_time():
    g = Grid(10.0, 64)
    U0 = RealField(g, 30.0 * np.exp(-(g.x**2)))
    spec = SolverRun(ModelSpec.power(5), U0, 1.0, 0.05)
    with pytest.raises(BlowUpError) as info:
        for _ in iterate(spec):
            pass
    assert info.value.t is not None and info.value.t < 1.0
    res = run(spec)
    assert res.status == "blow-up"
    assert res.last_valid_time == info.value.t


def test_default_dt_is_capped():
    g = Grid(100.0, 512)
    assert default_dt(ModelSpec.kdv(), g.zeros()) == 0.05
    U0 = soliton(SolitonParams(c=0.3), g)
    assert 0 < default_dt(ModelSpec.kdv(), U0) <= 0.05


def test_sampler_receives_every_stride():
    g = Grid(100.0, 256)
    U0 = soliton(SolitonParams(c=0.3), g)
    res = run(SolverRun(ModelSpec.kdv(), U0, 1.0, 0.1, diagnostics_stride=3))
    assert [round(s.t, 10) for s in res.samples] == [0.0, 0.3, 0.6, 0.9, 1.0]
    assert res.samples[0] == sample(U0, 0.0)
