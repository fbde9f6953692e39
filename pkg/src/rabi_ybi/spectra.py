"""
Spectra, parity sectors and level-spacing statistics.

The statistics follow the scikit-learn estimator API so they compose with
pipelines and parameter searches: :class:`GapRatioStatistics` and
:class:`SpectralUnfolder` take a 1-d array of levels in ``fit``.  The
functions :func:`gap_ratios`, :func:`nnsd_histogram`,
:func:`reference_ensembles` and :func:`sweep_stats` wrap them for
:class:`Spectrum` objects and random-matrix baselines.
"""

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_hermitian, check_int, check_levels
from .models import ModelParams, build_model, has_parity, parity_diagonal

logger = logging.getLogger(__name__)

WORKERS_ENV = "RABI_YBI_WORKERS"


class ParityBrokenError(ValueError):
    """Raised when parity sectors are requested for a parity-breaking model."""


@dataclass
class Spectrum:
    """Sorted eigenvalues with per-level parity labels and convergence flags.

    ``sector_labels`` holds +1/-1 for sector-resolved levels and 0 when the
    spectrum was not resolved by parity.
    """

    eigenvalues: np.ndarray
    sector_labels: np.ndarray
    converged: np.ndarray
    params: ModelParams
    n_max_used: int
    model: str = "dicke"

    @property
    def converged_levels(self):
        """Contiguous converged prefix; isolated converged levels above it are dropped."""
        return self.eigenvalues[: self.n_converged_prefix]

    @property
    def n_converged_prefix(self):
        if self.converged.all():
            return int(self.converged.size)
        return int(np.argmin(self.converged))

    @property
    def converged_fraction(self):
        return float(self.converged.mean()) if self.converged.size else 0.0


@dataclass
class LevelStats:
    gap_ratios: np.ndarray
    mean_ratio: float
    sector: str
    n_levels_used: int
    n_degenerate_removed: int = 0
    histogram: tuple | None = None  # (bin_edges, density)
    spacings: np.ndarray | None = field(default=None, repr=False)


def convergence_flags(levels, levels_larger, tol=1e-8):
    """``|E_k(n_max) - E_k(n_max + step)| < tol`` level by level."""
    flags = np.zeros(levels.size, dtype=bool)
    k = min(levels.size, levels_larger.size)
    flags[:k] = np.abs(levels[:k] - levels_larger[:k]) < tol
    return flags


def _sector_indices(space, sector):
    par = parity_diagonal(space)
    return np.flatnonzero(par == sector)


def _eigvals(model, params, sector=None):
    H = build_model(model, params).data
    if sector is not None:
        idx = _sector_indices(params.space, sector)
        H = H[np.ix_(idx, idx)]
    if not np.any(H.imag):
        H = H.real
    return np.linalg.eigvalsh(H)


def diagonalize(H, params, model="dicke", tol=1e-8, n_max_step=8):
    """Full spectrum of ``H`` with truncation-convergence flags.

    The flags compare against the same model rebuilt at ``n_max + n_max_step``.
    """
    check_hermitian(H.data, tol=1e-12, name="H")
    levels = np.linalg.eigvalsh(H.data)
    larger = _eigvals(model, params.replace(n_max=params.n_max + n_max_step))
    return Spectrum(
        eigenvalues=levels,
        sector_labels=np.zeros(levels.size, dtype=int),
        converged=convergence_flags(levels, larger, tol),
        params=params,
        n_max_used=params.n_max,
        model=model,
    )


def split_parity_sectors(params, model="dicke", tol=1e-8, n_max_step=8):
    """Diagonalise the even (+1) and odd (-1) parity blocks separately.

    Returns ``(even, odd)``.
    """
    if not has_parity(model, params):
        raise ParityBrokenError(
            "parity is broken (epsilon != 0); use diagonalize() on the full Hamiltonian"
        )
    H = build_model(model, params).data
    if not np.any(H.imag):
        H = H.real
    par = parity_diagonal(params.space)
    off_block = np.abs(H[np.ix_(par == 1, par == -1)]).max(initial=0.0)
    if off_block > 1e-13 * max(np.abs(H).max(), 1.0):
        raise ParityBrokenError(f"Hamiltonian couples parity sectors (max {off_block:.2e})")
    bigger = params.replace(n_max=params.n_max + n_max_step)
    out = []
    for sector in (1, -1):
        idx = np.flatnonzero(par == sector)
        levels = np.linalg.eigvalsh(H[np.ix_(idx, idx)])
        larger = _eigvals(model, bigger, sector)
        out.append(
            Spectrum(
                eigenvalues=levels,
                sector_labels=np.full(levels.size, sector),
                converged=convergence_flags(levels, larger, tol),
                params=params,
                n_max_used=params.n_max,
                model=model,
            )
        )
    return tuple(out)


def sector_spectrum(params, model="dicke", sector="even", tol=1e-8, n_max_step=8):
    """Spectrum of one parity sector (``'even'``/``'odd'``) or of the full space (``'none'``)."""
    if sector == "none":
        return diagonalize(build_model(model, params), params, model, tol, n_max_step)
    label = {"even": 1, "odd": -1}[sector]
    if not has_parity(model, params):
        raise ParityBrokenError("parity is broken (epsilon != 0); use sector='none'")
    levels = _eigvals(model, params, label)
    larger = _eigvals(model, params.replace(n_max=params.n_max + n_max_step), label)
    return Spectrum(
        levels,
        np.full(levels.size, label),
        convergence_flags(levels, larger, tol),
        params,
        params.n_max,
        model,
    )


def trim_levels(levels, trim):
    """Drop the lowest and highest ``trim`` fraction of ``levels``."""
    if not 0.0 <= trim < 0.5:
        raise ValueError(f"trim must lie in [0, 0.5), got {trim}")
    cut = int(np.floor(trim * levels.size))
    return levels[cut : levels.size - cut]


def _ratios(gaps):
    lo = np.minimum(gaps[:-1], gaps[1:])
    hi = np.maximum(gaps[:-1], gaps[1:])
    return lo / hi


class GapRatioStatistics(BaseEstimator, TransformerMixin):
    """Consecutive-gap ratios ``min(s_n, s_n+1) / max(s_n, s_n+1)`` of a level sequence.

    Parameters
    ----------
    trim : float
        Fraction of levels discarded at each end before computing gaps.
    degeneracy_tol : float
        Gaps below ``degeneracy_tol * width`` are treated as exact degeneracies
        and removed from the gap sequence.
    min_levels : int
        Minimum number of input levels.
    """

    def __init__(self, trim=0.15, degeneracy_tol=1e-10, min_levels=50):
        self.trim = trim
        self.degeneracy_tol = degeneracy_tol
        self.min_levels = min_levels

    def _gaps(self, levels):
        levels = check_levels(levels)
        if levels.size < self.min_levels:
            raise ValueError(f"need at least {self.min_levels} levels, got {levels.size}")
        kept = trim_levels(levels, self.trim)
        gaps = np.diff(kept)
        width = kept[-1] - kept[0]
        degenerate = gaps < self.degeneracy_tol * width
        n_removed = int(degenerate.sum())
        if n_removed:
            logger.info("removed %d degenerate gaps out of %d", n_removed, gaps.size)
        gaps = gaps[~degenerate]
        if gaps.size < 2:
            raise ValueError("fewer than two non-degenerate gaps remain")
        return kept, gaps, n_removed

    def fit(self, X, y=None):
        kept, gaps, n_removed = self._gaps(X)
        self.gap_ratios_ = _ratios(gaps)
        self.mean_ratio_ = float(self.gap_ratios_.mean())
        self.n_levels_used_ = int(kept.size)
        self.n_degenerate_removed_ = n_removed
        return self

    def transform(self, X):
        check_is_fitted(self, "gap_ratios_")
        return _ratios(self._gaps(X)[1])


class SpectralUnfolder(BaseEstimator, TransformerMixin):
    """Map levels through a polynomial fit of the cumulative level count.

    After ``fit`` the unfolded levels have unit mean spacing on average.
    """

    def __init__(self, degree=7):
        self.degree = degree

    def fit(self, X, y=None):
        levels = check_levels(X)
        check_int(self.degree, "degree", min_value=1)
        if self.degree > levels.size / 10:
            raise ValueError(
                f"unfolding degree {self.degree} too high for {levels.size} levels (max levels/10)"
            )
        staircase = np.arange(1, levels.size + 1, dtype=float)
        self.polynomial_ = Polynomial.fit(levels, staircase, self.degree)
        return self

    def transform(self, X):
        check_is_fitted(self, "polynomial_")
        return self.polynomial_(check_levels(X))


def unit_spacings(levels, degree=7):
    """Nearest-neighbour spacings after unfolding, rescaled to unit mean."""
    unfolded = SpectralUnfolder(degree).fit_transform(levels)
    s = np.diff(np.sort(unfolded))
    return s / s.mean()


def spacing_histogram(spacings, bins=40, value_range=(0.0, 4.0)):
    """Density histogram normalised by the total number of spacings."""
    counts, edges = np.histogram(spacings, bins=bins, range=value_range)
    density = counts / (spacings.size * np.diff(edges))
    return edges, density


def _select(spectrum, min_levels):
    levels = spectrum.converged_levels
    if levels.size < min_levels:
        raise ValueError(
            f"need at least {min_levels} converged levels, got {levels.size} "
            f"(n_max={spectrum.n_max_used}); raise n_max"
        )
    return levels


def _sector_name(spectrum):
    label = int(spectrum.sector_labels[0]) if spectrum.sector_labels.size else 0
    return {1: "even", -1: "odd"}.get(label, "none")


def gap_ratios(spectrum, trim=0.15, degeneracy_tol=1e-10, min_levels=50):
    """Gap-ratio statistics of the converged levels of ``spectrum``."""
    levels = _select(spectrum, min_levels)
    est = GapRatioStatistics(trim, degeneracy_tol, min_levels).fit(levels)
    return LevelStats(
        gap_ratios=est.gap_ratios_,
        mean_ratio=est.mean_ratio_,
        sector=_sector_name(spectrum),
        n_levels_used=est.n_levels_used_,
        n_degenerate_removed=est.n_degenerate_removed_,
    )


def nnsd_histogram(
    spectrum, unfolding_degree=7, bins=40, value_range=(0.0, 4.0), trim=0.15, min_levels=50
):
    """Unfolded nearest-neighbour spacing histogram of the converged mid-spectrum."""
    levels = _select(spectrum, min_levels)
    stats = gap_ratios(spectrum, trim=trim, min_levels=min_levels)
    s = unit_spacings(trim_levels(levels, trim), unfolding_degree)
    stats.histogram = spacing_histogram(s, bins, value_range)
    stats.spacings = s
    return stats


def _draw_levels(kind, dimension, rng):
    if kind == "poisson":
        return np.sort(rng.uniform(0.0, float(dimension), size=dimension))
    a = rng.standard_normal((dimension, dimension))
    return np.linalg.eigvalsh(0.5 * (a + a.T))


def reference_ensembles(
    kind,
    dimension,
    draws,
    seed=0,
    trim=0.15,
    unfolding_degree=7,
    bins=40,
    value_range=(0.0, 4.0),
):
    """Pooled level statistics of Poisson or GOE reference spectra.

    Draw ``i`` uses its own generator spawned from ``seed``, so results depend
    only on ``(seed, i)`` and are reproducible bit for bit.
    """
    if kind not in ("poisson", "goe"):
        raise ValueError(f"kind must be 'poisson' or 'goe', got {kind!r}")
    check_int(dimension, "dimension", min_value=100)
    check_int(draws, "draws", min_value=10)
    children = np.random.SeedSequence(seed).spawn(draws)
    ratios, spacings, used, removed = [], [], 0, 0
    for child in children:
        levels = _draw_levels(kind, dimension, np.random.default_rng(child))
        est = GapRatioStatistics(trim=trim).fit(levels)
        ratios.append(est.gap_ratios_)
        used += est.n_levels_used_
        removed += est.n_degenerate_removed_
        spacings.append(unit_spacings(trim_levels(levels, trim), unfolding_degree))
    ratios = np.concatenate(ratios)
    spacings = np.concatenate(spacings)
    return LevelStats(
        gap_ratios=ratios,
        mean_ratio=float(ratios.mean()),
        sector=kind,
        n_levels_used=used,
        n_degenerate_removed=removed,
        histogram=spacing_histogram(spacings, bins, value_range),
        spacings=spacings,
    )


def default_workers():
    value = os.environ.get(WORKERS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def _sweep_point(params, model, sector, trim, tol, n_max_step, min_levels):
    row = dict(params.to_dict(), model=model, sector=sector)
    try:
        spectrum = sector_spectrum(params, model, sector, tol, n_max_step)
        stats = gap_ratios(spectrum, trim=trim, min_levels=min_levels)
        row.update(
            mean_ratio=stats.mean_ratio,
            n_levels_used=stats.n_levels_used,
            n_degenerate_removed=stats.n_degenerate_removed,
            converged_fraction=spectrum.converged_fraction,
            error="",
        )
    except ValueError as exc:
        row.update(
            mean_ratio=float("nan"),
            n_levels_used=0,
            n_degenerate_removed=0,
            converged_fraction=float("nan"),
            error=str(exc),
        )
    return row


def sweep_stats(
    grid,
    model="dicke",
    sector="even",
    trim=0.15,
    tol=1e-8,
    n_max_step=8,
    min_levels=50,
    workers=None,
):
    """One statistics row per grid point and sector.

    ``sector`` is ``'even'``, ``'odd'``, ``'both'`` or ``'none'``.  Failures at a
    grid point are recorded in that row's ``error`` field.  Rows come back in
    input order whatever the worker count.
    """
    sectors = ("even", "odd") if sector == "both" else (sector,)
    jobs = [(p, s) for p in grid for s in sectors]
    workers = default_workers() if workers is None else workers
    run = lambda job: _sweep_point(job[0], model, job[1], trim, tol, n_max_step, min_levels)
    if workers <= 1 or len(jobs) <= 1:
        return [run(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


SWEEP_COLUMNS = (
    "model",
    "delta",
    "omega",
    "g",
    "epsilon",
    "n_qubits",
    "rep",
    "n_max",
    "sector",
    "mean_ratio",
    "n_levels_used",
    "n_degenerate_removed",
    "converged_fraction",
    "error",
)


def write_sweep_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row[k]) for k in SWEEP_COLUMNS})


def write_histogram_csv(stats, fh):
    edges, density = stats.histogram
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["bin_left", "bin_right", "density"])
    for left, right, d in zip(edges[:-1], edges[1:], density):
        writer.writerow([_fmt(left), _fmt(right), _fmt(d)])


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value
