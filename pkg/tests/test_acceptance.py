"""End-to-end acceptance runs for the benchmark deliverables.

Each test prints one PASS/FAIL line (visible with ``pytest -s``).  The heavy
convergence studies run once per session through the real CLI and are shared
across criteria.  Expected error magnitudes are frozen regression targets
for the default double-well problem; tolerances are factors wide enough to
absorb Monte Carlo variation between runs with different seeds.
"""

import numpy as np
import pytest

from tamedac import (
    ModelParams,
    NoiseGrid,
    NoiseKey,
    NoiseRealization,
    RunConfig,
    SpectralField,
    coupled_terminal,
    eigenvalue,
    increment_variance,
    moment_diagnostics,
    nonlinearity_galerkin,
    sample_fine_increment,
)
from tamedac.cli import main
from tamedac.reporting import load_error_csv

from oracles import odd_drift_expansion

# Regression targets: joint-mode rms errors of the default problem at
# M = N in {4, ..., 128} against a high-resolution reference.
TARGET_JOINT_ERRORS = {
    4: 0.106381, 8: 0.077172, 16: 0.055174,
    32: 0.039209, 64: 0.027624, 128: 0.019225,
}
INV_SQRT2 = 0.7071067811865476
QUARTER_INV_SQRT2 = 0.17677669529663687


def _report(line: str) -> None:
    print(f"\n[acceptance] {line}")


def _run_study(tmp_dir, mode: str, resolutions: str, ref: int, samples: int,
               seed: int = 42, plot: bool = False):
    out = tmp_dir / f"{mode}_{samples}.csv"
    svg = tmp_dir / f"{mode}_{samples}.svg"
    argv = ["converge", "--mode", mode, "--resolutions", resolutions,
            "--ref", str(ref), "--samples", str(samples), "--seed", str(seed),
            "--threads", "1", "--out", str(out)]
    if plot:
        argv += ["--plot", str(svg)]
    code = main(argv)
    assert code == 0, f"converge exited with {code}"
    points, n_samples, slope = load_error_csv(str(out))
    assert n_samples == samples
    return points, slope, out, svg


@pytest.fixture(scope="module")
def work_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def joint_run(work_dir):
    return _run_study(work_dir, "joint", "4,8,16,32,64,128", ref=1024, samples=200)


@pytest.fixture(scope="module")
def spatial_run(work_dir):
    return _run_study(work_dir, "spatial", "4,8,16,32,64,128", ref=1024, samples=100)


@pytest.fixture(scope="module")
def temporal_run(work_dir):
    return _run_study(work_dir, "temporal", "8,16,32,64,128,256", ref=1024, samples=100)


def test_criterion_1_joint_error_magnitudes(joint_run):
    points, _, _, _ = joint_run
    factors = {}
    for p in points:
        target = TARGET_JOINT_ERRORS[p.resolution]
        factors[p.resolution] = max(p.rms_error / target, target / p.rms_error)
    errors = [p.rms_error for p in points]
    monotone = all(a > b for a, b in zip(errors, errors[1:]))
    ok = monotone and all(f <= 1.6 for f in factors.values())
    worst = max(factors.values())
    _report(f"criterion 1 (joint error magnitudes): {'PASS' if ok else 'FAIL'} "
            f"worst factor {worst:.3f} (limit 1.6), monotone={monotone}, "
            f"errors={['%.6f' % e for e in errors]}")
    assert monotone, f"errors not monotone: {errors}"
    assert all(f <= 1.6 for f in factors.values()), f"factors {factors}"


def test_criterion_2_joint_rate(joint_run):
    _, slope, _, _ = joint_run
    ok = 0.38 <= slope <= 0.60
    _report(f"criterion 2 (joint rate): {'PASS' if ok else 'FAIL'} "
            f"slope {slope:.4f} in [0.38, 0.60]")
    assert ok, f"joint slope {slope} outside [0.38, 0.60]"


def test_criterion_3_spatial_rate(spatial_run):
    points, slope, _, _ = spatial_run
    ok = 0.38 <= slope <= 0.62
    _report(f"criterion 3 (spatial rate): {'PASS' if ok else 'FAIL'} "
            f"slope {slope:.4f} in [0.38, 0.62], "
            f"errors={['%.6f' % p.rms_error for p in points]}")
    assert ok, f"spatial slope {slope} outside [0.38, 0.62]"


def test_criterion_4_temporal_rate(temporal_run):
    points, slope, _, _ = temporal_run
    ok = 0.35 <= slope <= 0.62
    _report(f"criterion 4 (temporal rate): {'PASS' if ok else 'FAIL'} "
            f"slope {slope:.4f} in [0.35, 0.62], "
            f"errors={['%.6f' % p.rms_error for p in points]}")
    assert ok, f"temporal slope {slope} outside [0.35, 0.62]"


def test_criterion_5_convolution_sampler_statistics():
    n_draws = 100_000
    worst_var, worst_mean = 0.0, 0.0
    for mode in (1, 4, 32):
        for tau in (1 / 64, 1 / 2048):
            grid = NoiseGrid(n_modes=mode, m_fine=n_draws, tau_fine=tau)
            draws = np.fromiter(
                (sample_fine_increment(NoiseKey(2024, 0, mode, k), grid)
                 for k in range(n_draws)),
                dtype=np.float64, count=n_draws,
            )
            target = increment_variance(mode, tau)
            var_factor = abs(draws.var() / target - 1.0)
            mean_sigmas = abs(draws.mean()) / (np.sqrt(target) / np.sqrt(n_draws))
            worst_var = max(worst_var, var_factor)
            worst_mean = max(worst_mean, mean_sigmas)
            assert var_factor <= 0.05, (mode, tau, var_factor)
            assert mean_sigmas <= 4.0, (mode, tau, mean_sigmas)
    _report(f"criterion 5 (convolution sampler): PASS worst variance deviation "
            f"{100 * worst_var:.2f}% (limit 5%), worst mean {worst_mean:.2f} sigma "
            f"(limit 4)")


def test_criterion_6_coupling_exactness(double_well):
    worst = 0.0
    for i in (1, 2, 5, 17, 64, 256):
        lam = eigenvalue(i)
        for tau in (1.0, 1 / 16, 1 / 256, 1 / 2048, 1e-6):
            whole = increment_variance(i, tau)
            half = increment_variance(i, tau / 2)
            rel = abs(np.exp(-lam * tau) * half + half - whole) / whole
            worst = max(worst, rel)
            assert rel <= 1e-14, (i, tau, rel)

    ref = 256
    grid = NoiseGrid.for_horizon(1.0, ref, ref)
    realization = NoiseRealization(grid, 42, 0)
    reference = coupled_terminal(double_well, realization, ref, ref)
    replay = coupled_terminal(double_well, NoiseRealization(grid, 42, 0), ref, ref)
    identical = np.array_equal(reference, replay)
    assert identical
    _report(f"criterion 6 (coupling exactness): PASS split identity worst "
            f"{worst:.2e} (limit 1e-14); path at reference resolution "
            f"bit-identical={identical}")


def test_criterion_7_cubic_projection_exactness(double_well):
    fld = SpectralField([INV_SQRT2, 0.0, 0.0, 0.0])
    out = nonlinearity_galerkin(double_well, fld).coeffs
    expected = np.array([QUARTER_INV_SQRT2, 0.0, QUARTER_INV_SQRT2, 0.0])
    assert out == pytest.approx(expected, abs=1e-11)

    rng = np.random.default_rng(1234)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 33))
        coeffs = rng.standard_normal(n)
        a3 = -float(rng.uniform(0.1, 4.0))
        a1 = float(rng.uniform(-2.0, 2.0))
        params = ModelParams(a3=a3, a2=0.0, a1=a1, a0=0.0, horizon_T=1.0,
                             initial_data=SpectralField([1.0]))
        got = nonlinearity_galerkin(params, SpectralField(coeffs), grid_size=4 * n)
        want = odd_drift_expansion(coeffs, a3, a1)
        gap = float(np.max(np.abs(got.coeffs - want)))
        scale = max(1.0, float(np.max(np.abs(want))))
        worst = max(worst, gap / scale)
        assert gap <= 1e-11 * scale, (n, a3, a1, gap)
    _report(f"criterion 7 (cubic projection exactness): PASS triple-angle check "
            f"and 100 random fields, worst relative gap {worst:.2e} (limit 1e-11)")


def test_criterion_8_taming_moment_property(double_well):
    config = RunConfig(mode="joint", resolutions=(64,), ref_resolution=128,
                       samples=100, master_seed=7, horizon_T=1.0,
                       params=double_well)
    (diag,) = moment_diagnostics(config, n_steps=4)
    drift_ok = diag.max_drift_norm <= (1.0 / diag.tau) * (1 + 1e-12)
    ok = (diag.blowups == 0 and diag.all_finite and diag.sup_p99 < 1e3 and drift_ok)
    _report(f"criterion 8 (taming/moment property): {'PASS' if ok else 'FAIL'} "
            f"blowups={diag.blowups}, finite={diag.all_finite}, "
            f"sup p99 {diag.sup_p99:.3f} (limit 1e3), max drift norm "
            f"{diag.max_drift_norm:.3f} <= 1/tau = {1 / diag.tau:g}")
    assert diag.blowups == 0
    assert diag.all_finite
    assert diag.sup_p99 < 1e3
    assert drift_ok


def test_criterion_9_byte_identical_outputs(work_dir):
    outputs = []
    for tag in ("first", "second"):
        out = work_dir / f"det_{tag}.csv"
        svg = work_dir / f"det_{tag}.svg"
        code = main(["converge", "--mode", "joint", "--resolutions", "4,8,16,32",
                     "--ref", "256", "--samples", "20", "--seed", "11",
                     "--threads", "1", "--out", str(out), "--plot", str(svg)])
        assert code == 0
        outputs.append((out.read_bytes(), svg.read_bytes()))
    identical = outputs[0] == outputs[1]
    _report(f"criterion 9 (determinism): {'PASS' if identical else 'FAIL'} "
            f"CSV and SVG byte-identical across reruns")
    assert identical
