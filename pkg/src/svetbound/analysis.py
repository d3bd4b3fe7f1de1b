"""Certified bound reports combining the SVD bound, tightness and the see-saw."""

from __future__ import annotations

import numpy as np

from .errors import ConsistencyError
from .filtering import FilteredAnalysis, FilterTriple, filtered_bound
from .seesaw import OracleConfig, seesaw_from_matrix
from .svetlichny import BoundReport, CorrelationMatrix, correlation_matrix, svetlichny_value
from .tightness import assemble_settings, check_tightness


def _certify(
    rho: np.ndarray,
    corr: CorrelationMatrix,
    *,
    oracle_config: OracleConfig | None,
    tightness_restarts: int,
    seed: int,
) -> BoundReport:
    s1 = float(corr.svd.singular_values[0])
    decomposition = check_tightness(corr.svd, restarts=tightness_restarts, seed=seed)

    candidates = []
    warm_starts = ()
    if decomposition.found:
        settings0, bilinear = assemble_settings(decomposition, corr)
        traced = svetlichny_value(rho, settings0)
        if abs(traced - bilinear) > 1e-9:
            raise ConsistencyError(
                f"trace and bilinear routes disagree: {traced!r} vs {bilinear!r}"
            )
        candidates.append((traced, settings0))
        warm_starts = (settings0,)

    oracle = seesaw_from_matrix(corr.matrix, oracle_config, warm_starts=warm_starts)
    candidates.append((oracle.value, oracle.settings))
    achieved, settings = max(candidates, key=lambda pair: pair[0])

    return BoundReport(
        bound=4.0 * s1,
        lambda1=s1,
        degeneracy=corr.svd.degeneracy(),
        tight=decomposition.found,
        achieved=achieved,
        settings=settings,
    )


def certify_unfiltered(
    rho: np.ndarray,
    *,
    oracle_config: OracleConfig | None = None,
    tightness_restarts: int = 64,
    seed: int = 42,
) -> BoundReport:
    """Certify the singular-value bound of a state as given.

    The report carries the bound, whether settings attaining it exist, and the
    best expectation actually constructed (tight decomposition if found, else
    the see-saw optimum, whichever is larger).
    """
    corr = correlation_matrix(rho)
    return _certify(
        rho, corr, oracle_config=oracle_config, tightness_restarts=tightness_restarts, seed=seed
    )


def certify_filtered(
    rho: np.ndarray,
    filters: FilterTriple,
    *,
    oracle_config: OracleConfig | None = None,
    tightness_restarts: int = 64,
    seed: int = 42,
) -> tuple[FilteredAnalysis, BoundReport]:
    """Filtered bound plus certification of the normalized filtered state."""
    fa = filtered_bound(rho, filters)
    report = _certify(
        fa.rho_prime,
        fa.m_prime,
        oracle_config=oracle_config,
        tightness_restarts=tightness_restarts,
        seed=seed,
    )
    return fa, report
