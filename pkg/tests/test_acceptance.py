"""Acceptance suite: one test per advertised guarantee, at stated tolerances.

Each test prints a single [criterion N] PASS line with the measured margin;
a failed assertion is the corresponding FAIL.
"""

import math
import time

import numpy as np
import pytest

from conftest import random_density, random_psd_2x2, random_su2
from svetbound.filtering import FilterTriple, apply_filter, filtered_bound
from svetbound.linalg import tensor
from svetbound.scan import ScanSpec, figure_data, optimize_filter, threshold_bisect
from svetbound.seesaw import (
    OracleConfig,
    bilinear_value,
    correlation_tensor,
    seesaw_max,
    update_a_pair,
    update_b_pair,
    update_c_pair,
)
from svetbound.states import build_chi_state, build_ghz_noise_state
from svetbound.svetlichny import MeasurementSettings, correlation_matrix
from svetbound.tightness import assemble_settings, check_tightness

SQ2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def random_pairs():
    """1000 seeded (state, filter triple) pairs shared by criteria 3 and 4."""
    rng = np.random.default_rng(42)
    pairs = []
    for _ in range(1000):
        rho = random_density(rng)
        ft = FilterTriple.from_operators(*(random_psd_2x2(rng) for _ in range(3)))
        pairs.append((rho, ft))
    return pairs


def test_criterion_1_closed_form_singular_values():
    worst = 0.0
    for p in (0.1, 0.25, 0.5, 0.9):
        s_chi = correlation_matrix(build_chi_state(p)).svd.singular_values
        worst = max(worst, np.abs(s_chi - [p, p, SQ2 * p / 2]).max())
        s_ghz = correlation_matrix(build_ghz_noise_state(p)).svd.singular_values
        worst = max(worst, np.abs(s_ghz - [SQ2 * p, SQ2 * p, 0.0]).max())
    assert worst <= 1e-10
    print(f"\n[criterion 1] PASS: family singular values match closed forms, worst {worst:.2e}")


def test_criterion_2_normalization_closed_forms():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        p = rng.uniform(0.0, 1.0)
        x, y, z = 10.0 ** rng.uniform(-0.5, 0.5, size=3)
        _, n_chi = apply_filter(build_chi_state(p), FilterTriple.diagonal(x, y, z))
        expected_chi = (
            (2 - SQ2) * p / 4
            + (1 - p) * x**2 * y**2 / 2
            + (2 + SQ2 * p) * x**2 * y**2 * z**2 / 4
        )
        _, n_ghz = apply_filter(build_ghz_noise_state(p), FilterTriple.diagonal(x, y, z))
        expected_ghz = (
            p / 2
            + (1 - p) * x**2 * (1 + y**2 + z**2) / 4
            + (1 + p) * x**2 * y**2 * z**2 / 4
        )
        worst = max(worst, abs(n_chi - expected_chi), abs(n_ghz - expected_ghz))
    assert worst <= 1e-12
    print(f"[criterion 2] PASS: filter normalizations match closed forms, worst {worst:.2e}")


def test_criterion_3_singular_value_transport(random_pairs):
    worst = 0.0
    for rho, ft in random_pairs:
        fa = filtered_bound(rho, ft)
        sx = np.linalg.svd(fa.x_matrix / fa.n_factor, compute_uv=False)
        worst = max(worst, np.abs(sx - fa.m_prime.svd.singular_values).max())
    assert worst <= 1e-9
    print(f"[criterion 3] PASS: X/N and M' singular values agree on 1000 states, worst {worst:.2e}")


def test_criterion_4_seesaw_respects_bound(random_pairs):
    worst = -np.inf
    for rho, _ in random_pairs:
        corr = correlation_matrix(rho)
        result = seesaw_max(rho, OracleConfig(restarts=20))
        worst = max(worst, result.value - 4.0 * corr.svd.singular_values[0])
    assert worst <= 1e-8
    print(f"[criterion 4] PASS: see-saw never beats 4*lambda1 on 1000 states, max excess {worst:.2e}")


def test_criterion_5_tightness_on_families():
    worst_residual, worst_gap = 0.0, 0.0
    for build in (build_chi_state, build_ghz_noise_state):
        for p in (0.2, 0.5, 0.8):
            corr = correlation_matrix(build(p))
            dec = check_tightness(corr.svd)
            assert dec.found
            worst_residual = max(worst_residual, dec.residual)
            _, value = assemble_settings(dec, corr)
            worst_gap = max(worst_gap, abs(value - 4.0 * corr.svd.singular_values[0]))
    assert worst_residual <= 1e-6
    assert worst_gap <= 1e-5
    print(
        f"[criterion 5] PASS: decompositions found on both families, "
        f"worst residual {worst_residual:.2e}, worst bound gap {worst_gap:.2e}"
    )


def test_criterion_6_violation_thresholds():
    start = time.monotonic()
    grid = np.round(np.arange(0.0, 1.0001, 0.05), 10)
    ghz = ScanSpec(family="ghz-noise", p_grid=grid)
    chi = ScanSpec(family="chi", p_grid=grid)
    t_unf = threshold_bisect(ghz, "unfiltered")
    t_ghz = threshold_bisect(ghz, "filtered")
    t_chi = threshold_bisect(chi, "filtered")
    elapsed = time.monotonic() - start
    assert t_unf == pytest.approx(0.7071, abs=1e-3)
    assert t_ghz == pytest.approx(0.3334, abs=2e-3)
    assert t_chi == pytest.approx(0.3697, abs=2e-3)
    assert elapsed < 300.0
    print(
        f"[criterion 6] PASS: thresholds {t_unf:.4f}/{t_ghz:.4f}/{t_chi:.4f} "
        f"vs 0.7071/0.3334/0.3697 in {elapsed:.0f}s"
    )


def test_criterion_7_activation_curves():
    fig2 = figure_data("fig2")
    by_p = {round(r.p, 2): r for r in fig2.records}
    pure = by_p[1.0]
    assert pure.unfiltered_attained == pytest.approx(4 * SQ2, abs=1e-6)
    assert pure.filtered_attained == pytest.approx(4 * SQ2, abs=1e-6)
    half = by_p[0.5]
    assert half.unfiltered_attained == pytest.approx(2 * SQ2, abs=1e-6)
    assert half.filtered_attained > 4.0

    fig1 = figure_data("fig1")
    worst_before = max(r.unfiltered_attained for r in fig1.records)
    assert worst_before <= 4.0 + 1e-9
    assert not any(r.violates_before for r in fig1.records)
    print(
        f"[criterion 7] PASS: activation curves reproduce endpoints, "
        f"chi unfiltered peak {worst_before:.6f} stays below 4"
    )


def test_criterion_8_property_suite():
    rng = np.random.default_rng(42)

    worst_lu = 0.0
    for _ in range(200):
        rho = random_density(rng)
        u = tensor(random_su2(rng), random_su2(rng), random_su2(rng))
        s0 = correlation_matrix(rho).svd.singular_values
        s1 = correlation_matrix(u @ rho @ u.conj().T).svd.singular_values
        worst_lu = max(worst_lu, np.abs(s0 - s1).max())
    assert worst_lu <= 1e-10

    worst_scale = 0.0
    for _ in range(200):
        rho = random_density(rng)
        ft = FilterTriple.from_operators(*(random_psd_2x2(rng) for _ in range(3)))
        scales = 10.0 ** rng.uniform(-1.0, 1.0, size=3)
        scaled = FilterTriple.from_operators(
            scales[0] * ft.f_a, scales[1] * ft.f_b, scales[2] * ft.f_c
        )
        fa0, fa1 = filtered_bound(rho, ft), filtered_bound(rho, scaled)
        worst_scale = max(
            worst_scale,
            abs(fa1.lambda1_prime - fa0.lambda1_prime),
            np.abs(fa1.rho_prime - fa0.rho_prime).max(),
        )
    assert worst_scale <= 1e-10

    worst_drop = -np.inf
    for _ in range(200):
        t = correlation_tensor(correlation_matrix(random_density(rng)).matrix)
        s = MeasurementSettings.random(rng)
        a, ap, b, bp, c, cp = s.a, s.a_prime, s.b, s.b_prime, s.c, s.c_prime
        value = bilinear_value(t, a, ap, b, bp, c, cp)
        for _ in range(3):
            b, bp = update_b_pair(t, a, ap, c, cp, previous=(b, bp))
            after = bilinear_value(t, a, ap, b, bp, c, cp)
            worst_drop = max(worst_drop, value - after)
            value = after
            a, ap = update_a_pair(t, b, bp, c, cp, previous=(a, ap))
            after = bilinear_value(t, a, ap, b, bp, c, cp)
            worst_drop = max(worst_drop, value - after)
            value = after
            c, cp = update_c_pair(t, a, ap, b, bp, previous=(c, cp))
            after = bilinear_value(t, a, ap, b, bp, c, cp)
            worst_drop = max(worst_drop, value - after)
            value = after
    assert worst_drop <= 1e-12

    worst_id = 0.0
    for _ in range(200):
        rho = random_density(rng)
        corr = correlation_matrix(rho)
        fa = filtered_bound(rho, FilterTriple.identity())
        worst_id = max(
            worst_id,
            np.abs(fa.x_matrix - corr.matrix).max(),
            abs(fa.n_factor - 1.0),
            np.abs(fa.m_prime.svd.singular_values - corr.svd.singular_values).max(),
        )
    assert worst_id <= 1e-12

    print(
        f"[criterion 8] PASS: 200-instance properties hold "
        f"(rotation {worst_lu:.2e}, scaling {worst_scale:.2e}, "
        f"monotonicity {worst_drop:.2e}, identity {worst_id:.2e})"
    )
