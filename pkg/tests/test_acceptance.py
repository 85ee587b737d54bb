"""Acceptance suite: nine numbered criteria, one pass/fail line each.

Run with `pytest -v tests/test_acceptance.py` to see one line per
criterion; add `-s` for the printed detail (worst deviations, fitted
slopes, fractions).  Tolerances are part of the acceptance contract and
are not adjustable knobs.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from spotfourier.estimator import double_sum_oracle, estimate_coefficients
from spotfourier.experiments import (
    SweepConfig,
    coefficient_error_sweep,
    inversion_bound_sweep,
    jump_recovery_experiment,
    rate_regression,
)
from spotfourier.fourier import TWO_PI, ObservedIncrements
from spotfourier.kernels import (
    dirichlet,
    dirichlet_rescaled,
    discretized_kernel_bound_gap,
    fejer,
)
from spotfourier.market_sim import (
    ConstantVol,
    JumpRecord,
    PartitionSpec,
    simulate_path,
    subsample,
    substream_seed,
)


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_kernel_identities_at_origin():
    worst = 0.0
    for order in range(1, 1025):
        worst = max(
            worst,
            abs(dirichlet(order, 0.0) - (2 * order + 1)),
            abs(dirichlet_rescaled(order, 0.0) - 1.0),
            abs(fejer(order, 0.0) - order),
        )
    _report(
        "criterion 1 (kernel identities, N in 1..1024, tolerance 1e-12)",
        worst <= 1e-12,
        f"max deviation {worst:.3e}",
    )


def test_criterion_2_fejer_tail_bound():
    worst = -np.inf
    for delta in (0.1, 0.5, 1.0):
        half = np.linspace(delta, np.pi, 5000)
        grid = np.concatenate((-half[::-1], half))  # 1e4 points with |z| >= delta
        for order in range(1, 1025):
            excess = fejer(order, grid) - np.pi**2 / (delta**2 * order)
            worst = max(worst, float(excess.max()))
    _report(
        "criterion 2 (Fejer tail bound pi^2/(delta^2 N), slack 1e-9)",
        worst <= 1e-9,
        f"max excess over bound {worst:.3e}",
    )


def test_criterion_3_discretized_kernel_bound_gap():
    t_values = np.linspace(-np.pi, np.pi, 32)
    worst = np.inf
    for order in (4, 8, 16, 32, 64, 128, 256):
        for exponent in (2.0, 3.0, 4.0):
            for cells in (64, 128, 256, 512, 1024, 2048, 4096):
                grid = PartitionSpec.regular(cells)
                for t in t_values:
                    gap = discretized_kernel_bound_gap(order, exponent, grid, float(t))
                    worst = min(worst, gap)
    _report(
        "criterion 3 (discretized kernel bound gap >= -1e-6, "
        "N x r x m x 32 t values)",
        worst >= -1e-6,
        f"min gap {worst:.3e}",
    )


def test_criterion_4_oracle_equivalence():
    rng = np.random.default_rng(2026)
    worst = 0.0
    for trial in range(50):
        m = int(rng.integers(32, 513))
        harmonics = int(rng.integers(4, 65))
        q = int(rng.integers(-8, 9))
        if trial % 2 == 0:
            grid = PartitionSpec.regular(m)
            path = simulate_path(ConstantVol(1.0), grid, substream_seed(7, trial))
            obs = subsample(path, grid)
        else:
            times = np.sort(rng.uniform(-np.pi, np.pi, size=m))
            obs = ObservedIncrements(
                times, rng.normal(scale=np.sqrt(TWO_PI / m), size=m)
            )
        table = estimate_coefficients(obs, harmonics, abs(q))
        oracle = double_sum_oracle(obs, harmonics, q)
        rel = abs(table.value(q) - oracle) / max(abs(oracle), 1e-12)
        worst = max(worst, rel)
    _report(
        "criterion 4 (estimator vs double-sum oracle, 50 paths, rel 1e-10)",
        worst <= 1e-10,
        f"max relative deviation {worst:.3e}",
    )


def test_criterion_5_inversion_bound_sweep():
    jump_sets = [
        JumpRecord(np.array([0.3]), np.array([1.0])),
        JumpRecord(np.array([-1.0, 0.7]), np.array([0.5, -1.0])),
        JumpRecord(
            np.array([-2.0, -0.5, 1.1, 2.4]), np.array([0.3, -0.8, 1.5, 0.2])
        ),
    ]
    orders = (8, 16, 32, 64, 128, 256, 512, 1024)
    t_grid = np.linspace(-np.pi, np.pi, 64)
    result = inversion_bound_sweep(jump_sets, orders, t_grid, slack=1e-9)
    failures = sum(1 for row in result.rows if not row[5])
    _report(
        "criterion 5 (Fejer inversion bound, 3 jump sets x 8 orders x 64 t, "
        "slack 1e-9)",
        result.all_passed,
        f"{failures} violations out of {len(result.rows)} checks",
    )


def test_criterion_6_constant_volatility_consistency():
    grid = PartitionSpec.regular(10_000)
    values = np.empty(200)
    for rep in range(200):
        path = simulate_path(ConstantVol(1.0), grid, substream_seed(0, rep))
        obs = subsample(path, grid)
        values[rep] = estimate_coefficients(obs, 500, 0).value(0).real
    se = values.std(ddof=1) / np.sqrt(values.size)
    deviation = abs(values.mean() - 1.0)
    _report(
        "criterion 6 (sigma=1, m=1e4, N=500, 200 replicates: mean c(0) "
        "within 3 SE of 1)",
        deviation <= 3 * se,
        f"mean {values.mean():.6f}, SE {se:.6f}, deviation {deviation / se:.2f} SE",
    )


def test_criterion_7_rate_decay():
    config = SweepConfig(
        n_values=(16, 32, 64, 128, 256, 512, 1024),
        grid=PartitionSpec.regular(100_000),
        model=ConstantVol(1.0),
        replicates=50,
        master_seed=0,
    )
    result = coefficient_error_sweep(config)
    fit = rate_regression(result.n_values, result.mean_errors)
    ok = fit.slope <= -0.25 and fit.r_squared >= 0.8
    _report(
        "criterion 7 (m=1e5, N in 16..1024, 50 replicates: log-log slope "
        "<= -0.25, r^2 >= 0.8)",
        ok,
        f"slope {fit.slope:.4f}, r^2 {fit.r_squared:.4f}",
    )


def test_criterion_8_jump_recovery_reproduction():
    at_jump = []
    off_ok = 0
    off_total = 0
    for seed in range(20):
        result = jump_recovery_experiment((700,), seed=seed)
        at_jump.extend(result.at_jump_values[700].tolist())
        est = result.estimates[700]
        record = result.jump_record
        raw = np.abs(est.times[:, None] - record.times[None, :]) % TWO_PI
        circular = np.minimum(raw, TWO_PI - raw)
        off_mask = (circular >= 0.1).all(axis=1)
        off_values = est.values[off_mask]
        off_ok += int((off_values <= 0.15).sum())
        off_total += off_values.size
    at_jump = np.array(at_jump)
    in_band = float(((at_jump >= 0.8) & (at_jump <= 1.2)).mean())
    off_frac = off_ok / off_total
    ok = in_band >= 0.9 and off_frac >= 0.9
    _report(
        "criterion 8 (20 seeds, M=700: at-jump values in [0.8, 1.2] for "
        ">= 90% of pairs; off-jump <= 0.15 for >= 90% of points)",
        ok,
        f"at-jump in-band {in_band:.3f} ({at_jump.size} pairs), "
        f"off-jump within 0.15: {off_frac:.3f} ({off_total} points)",
    )


def _run_cli(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "spotfourier", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )
    return proc


def _snapshot(paths):
    return {p.name: p.read_bytes() for p in paths if p.exists()}


def test_criterion_9_cli_determinism(tmp_path):
    sweep_config = tmp_path / "sweep.json"
    sweep_config.write_text(json.dumps({
        "model": {"kind": "constant", "value": 1.0},
        "grid_cells": 256,
        "n_values": [8, 16, 32, 64],
        "replicates": 30,
        "seed": 5,
    }))
    jumps_csv = tmp_path / "fixed_jumps.csv"
    jumps_csv.write_text("tau,delta_j\n-1.0,0.5\n0.7,-1.0\n")

    def invoke_all(run_dir):
        run_dir.mkdir()
        commands = [
            ["simulate", "--model", "sinshift:1.0", "--jumps", "lambda=2,marks=unit",
             "--grid-points", "3000", "--seed", "42",
             "--out", str(run_dir / "path.csv"),
             "--jumps-out", str(run_dir / "jumps.csv"),
             "--ticks-out", str(run_dir / "ticks.csv")],
            ["estimate", "--input", str(run_dir / "ticks.csv"),
             "--harmonics", "300", "--degree", "9", "--eval-points", "201",
             "--out", str(run_dir / "estimate.csv"),
             "--coeffs-out", str(run_dir / "coeffs.csv")],
            ["sweep", "--config", str(sweep_config),
             "--out-dir", str(run_dir / "sweep")],
            ["jumps-demo", "--out-dir", str(run_dir / "demo"), "--seed", "1",
             "--grid-points", "4000", "--degrees", "10,50"],
            ["inversion-check", "--jumps", str(jumps_csv),
             "--n-list", "8,64,512", "--t-points", "32",
             "--out", str(run_dir / "bounds.csv")],
        ]
        for command in commands:
            proc = _run_cli(command, tmp_path)
            assert proc.returncode == 0, f"{command[0]} failed: {proc.stderr}"
        files = sorted(run_dir.rglob("*.csv"))
        assert len(files) >= 12
        return {str(p.relative_to(run_dir)): p.read_bytes() for p in files}

    first = invoke_all(tmp_path / "run_a")
    second = invoke_all(tmp_path / "run_b")
    same_names = sorted(first) == sorted(second)
    diffs = [name for name in first if first[name] != second.get(name)]
    _report(
        "criterion 9 (repeated CLI invocations are byte-identical)",
        same_names and not diffs,
        f"{len(first)} files compared, differing: {diffs or 'none'}",
    )
