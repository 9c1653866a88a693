"""Sampling, log-binned power-law fitting, and middle-initial estimators."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from .core import Dataset
from .errors import InsufficientDataError, MissingTruthError

# Bins holding fewer values than this end the usable part of a histogram.
MIN_BIN_COUNT = 10
DEFAULT_BINS_PER_DECADE = 4


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite distribution over distinct values (integers or letters)."""

    support: tuple[Hashable, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        support = tuple(self.support)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)
        if not support:
            raise ValueError("distribution needs at least one support value")
        if len(support) != len(weights):
            raise ValueError("support and weights differ in length")
        if len(set(support)) != len(support):
            raise ValueError("support values must be distinct")
        if any(w < 0 or not math.isfinite(w) for w in weights):
            raise ValueError("weights must be finite and non-negative")
        if abs(sum(weights) - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {sum(weights)!r}, expected 1")

    @classmethod
    def from_mapping(cls, mapping: Mapping[Any, float], normalize: bool = False) -> DiscreteDistribution:
        support = tuple(mapping)
        weights = np.array([mapping[k] for k in support], dtype=float)
        if normalize:
            weights = weights / weights.sum()
        return cls(support, tuple(weights.tolist()))

    @classmethod
    def from_counts(cls, counts: Mapping[Any, float]) -> DiscreteDistribution:
        return cls.from_mapping({k: v for k, v in counts.items() if v > 0}, normalize=True)

    def as_dict(self) -> dict[Any, float]:
        return dict(zip(self.support, self.weights))

    @cached_property
    def _cdf(self) -> np.ndarray:
        cdf = np.cumsum(self.weights)
        cdf[-1] = 1.0
        return cdf

    def mean(self) -> float:
        return float(np.dot(np.asarray(self.support, dtype=float), self.weights))

    def to_json(self) -> dict[str, list]:
        return {"support": list(self.support), "weights": list(self.weights)}

    @classmethod
    def from_json(cls, obj: Mapping[str, Sequence]) -> DiscreteDistribution:
        """Inverse of :meth:`to_json`; raw weights (e.g. counts) are normalized.

        Weights that already sum to 1 are kept bit-for-bit so a serialized
        config reproduces the same draws.
        """
        weights = [float(w) for w in obj["weights"]]
        total = sum(weights)
        if total <= 0:
            raise ValueError("weights sum to zero")
        if abs(total - 1.0) > 1e-9:
            weights = [w / total for w in weights]
        return cls(tuple(obj["support"]), tuple(weights))


def sample_discrete(dist: DiscreteDistribution, rng: np.random.Generator, size: int | None = None):
    """Draw from ``dist`` by inverse CDF on uniform variates.

    Returns a single support value, or a numpy array of ``size`` values.
    """
    u = rng.random(size)
    idx = np.minimum(np.searchsorted(dist._cdf, u, side="right"), len(dist.support) - 1)
    if size is None:
        return dist.support[int(idx)]
    support = np.asarray(dist.support)
    return support[idx]


@dataclass(frozen=True)
class PowerLawSpec:
    """Discrete power law ``P(f) ~ f**-alpha`` truncated to ``[x_min, x_max]``."""

    alpha: float
    x_min: int = 1
    x_max: int = 1000

    def __post_init__(self) -> None:
        if not self.alpha > 1:
            raise ValueError(f"alpha must exceed 1, got {self.alpha}")
        if not 1 <= self.x_min <= self.x_max:
            raise ValueError(f"need 1 <= x_min <= x_max, got {self.x_min}, {self.x_max}")

    def pmf(self) -> tuple[np.ndarray, np.ndarray]:
        support = np.arange(self.x_min, self.x_max + 1)
        mass = support.astype(float) ** -self.alpha
        return support, mass / mass.sum()

    def to_distribution(self) -> DiscreteDistribution:
        support, p = self.pmf()
        return DiscreteDistribution(tuple(int(s) for s in support), tuple(p.tolist()))

    def to_json(self) -> dict[str, float]:
        return {"alpha": self.alpha, "x_min": self.x_min, "x_max": self.x_max}


def sample_power_law_count(spec: PowerLawSpec, rng: np.random.Generator, size: int | None = None):
    """Draw integer counts with probability proportional to ``f**-alpha``."""
    support, p = spec.pmf()
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    idx = np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), len(support) - 1)
    if size is None:
        return int(support[int(idx)])
    return support[idx]


@dataclass(frozen=True)
class BinPoint:
    center: float
    density: float
    count: float
    lo: int
    hi: int


@dataclass(frozen=True)
class BinnedHistogram:
    points: tuple[BinPoint, ...]
    bins_per_decade: int

    def __post_init__(self) -> None:
        centers = [p.center for p in self.points]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError("bin centers must be strictly increasing")
        if any(p.density < 0 for p in self.points):
            raise ValueError("densities must be non-negative")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], bins_per_decade: int = DEFAULT_BINS_PER_DECADE):
        pts = tuple(BinPoint(float(c), float(d), math.nan, 0, 0) for c, d in pairs)
        return cls(pts, bins_per_decade)

    def pairs(self) -> list[tuple[float, float]]:
        return [(p.center, p.density) for p in self.points]


def log_bin_histogram(
    values: Iterable[int],
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE,
    *,
    weights: Iterable[float] | None = None,
    upper: int | None = None,
    min_count: float | None = None,
) -> BinnedHistogram:
    """Histogram positive integers in logarithmically growing bins.

    Bin edges sit at powers of ``10**(1/bins_per_decade)`` starting at 1 and
    each bin covers the integers in ``[lo, hi)``. Density is the bin's count
    divided by the number of integers it covers; the center is the geometric
    mean of those integers. Empty bins are omitted.

    Args:
        upper: known largest possible value; a bin straddling it only counts
            integers up to ``upper`` in its width.
        min_count: if given, the histogram ends at the first bin holding fewer
            values, so a sparse, noisy tail does not reach the fit.
    """
    if bins_per_decade < 1:
        raise ValueError("bins_per_decade must be >= 1")
    vals = np.asarray(list(values))
    if vals.size == 0:
        raise InsufficientDataError("no values to bin")
    if not np.issubdtype(vals.dtype, np.integer):
        if not np.all(np.mod(vals, 1) == 0):
            raise ValueError("values must be integers")
        vals = vals.astype(np.int64)
    if vals.min() < 1:
        raise ValueError(f"values must be positive, got {int(vals.min())}")
    w = None if weights is None else np.asarray(list(weights), dtype=float)
    if w is not None and w.shape != vals.shape:
        raise ValueError("weights and values differ in length")
    counts = np.bincount(vals, weights=w)
    csum = np.concatenate([[0.0], np.cumsum(counts)])
    vmax = int(vals.max())
    top = vmax if upper is None else max(vmax, int(upper))

    points = []
    k = 0
    while True:
        lo_edge = 10 ** (k / bins_per_decade)
        hi_edge = 10 ** ((k + 1) / bins_per_decade)
        k += 1
        lo = math.ceil(lo_edge - 1e-9)
        hi = math.ceil(hi_edge - 1e-9) - 1
        if lo > vmax:
            break
        if upper is not None:
            hi = min(hi, top)
        if hi < lo:
            continue
        count = float(csum[min(hi, vmax) + 1] - csum[lo])
        if min_count is not None and count < min_count:
            break
        if count <= 0:
            continue
        n_int = hi - lo + 1
        center = float(lo) if n_int == 1 else math.exp((math.lgamma(hi + 1) - math.lgamma(lo)) / n_int)
        points.append(BinPoint(center, count / n_int, count, lo, hi))
    return BinnedHistogram(tuple(points), bins_per_decade)


def fit_power_law_slope(hist: BinnedHistogram) -> tuple[float, float]:
    """Unweighted least squares of log10 density on log10 bin center.

    Returns ``(alpha, intercept)`` where ``alpha`` is the magnitude of the
    slope and ``intercept`` is in log10 units.
    """
    pts = [(p.center, p.density) for p in hist.points if p.density > 0]
    if len(pts) < 2:
        raise InsufficientDataError(f"need at least 2 populated bins to fit, got {len(pts)}")
    x = np.log10([c for c, _ in pts])
    y = np.log10([d for _, d in pts])
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0:
        raise InsufficientDataError("bin centers are degenerate")
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    return -slope, float(ym - slope * xm)


def fit_counts(
    values: Iterable[int],
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE,
    *,
    upper: int | None = None,
    min_count: float | None = MIN_BIN_COUNT,
) -> tuple[float, float]:
    """Log-bin then fit; the pipeline used on raw frequency samples."""
    hist = log_bin_histogram(values, bins_per_decade, upper=upper, min_count=min_count)
    return fit_power_law_slope(hist)


# -- middle-initial estimators -------------------------------------------


def single_author_occurrences(ds: Dataset) -> list:
    return [occs[0] for occs in ds.papers().values() if len(occs) == 1]


def estimate_intrinsic_middle_rate(ds: Dataset) -> float:
    """Fraction of single-author papers whose author shows a middle initial.

    Rests on the assumption that authors always report their own middle
    initial when writing alone.
    """
    singles = single_author_occurrences(ds)
    if not singles:
        raise InsufficientDataError("dataset has no single-author papers")
    return sum(1 for occ in singles if occ.middle_token) / len(singles)


def overall_middle_rate(ds: Dataset) -> float:
    if len(ds) == 0:
        raise InsufficientDataError("dataset is empty")
    return sum(1 for occ in ds.occurrences if occ.middle_token) / len(ds)


def estimate_reporting_rate(ds: Dataset, intrinsic: float | None = None) -> float:
    """Overall middle-initial rate divided by the intrinsic rate, capped at 1.

    ``intrinsic`` defaults to :func:`estimate_intrinsic_middle_rate`.
    """
    if intrinsic is None:
        intrinsic = estimate_intrinsic_middle_rate(ds)
    if intrinsic <= 0:
        raise InsufficientDataError("reporting rate undefined: intrinsic middle-initial rate is 0")
    return min(1.0, overall_middle_rate(ds) / intrinsic)


@dataclass(frozen=True)
class MiddleRateFit:
    intrinsic: float
    reporting: float
    intrinsic_se: float
    reporting_se: float
    n_individuals: int
    iterations: int


def _individual_counts(ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    if not ds.is_simulated:
        raise MissingTruthError("dataset has no true author identities")
    if len(ds) == 0:
        raise InsufficientDataError("dataset is empty")
    ids = np.fromiter((occ.true_author_id for occ in ds.occurrences), dtype=np.int64, count=len(ds))
    shown = np.fromiter((bool(occ.middle_token) for occ in ds.occurrences), dtype=np.int64, count=len(ds))
    _, inverse = np.unique(ids, return_inverse=True)
    n = np.bincount(inverse).astype(float)
    k = np.bincount(inverse, weights=shown).astype(float)
    return n, k


def _mixture_loglik(pi: float, r: float, n: np.ndarray, k: np.ndarray) -> float:
    seen = k > 0
    with np.errstate(divide="ignore"):
        ll = seen.sum() * math.log(pi)
        ll += float((k[seen] * math.log(r)).sum())
        if r < 1:
            ll += float(((n[seen] - k[seen]) * math.log1p(-r)).sum())
        elif np.any(n[seen] > k[seen]):
            return -math.inf
        hidden = np.power(1.0 - r, n[~seen])
        ll += float(np.log(pi * hidden + (1.0 - pi)).sum())
    return ll


def _standard_errors(pi: float, r: float, n: np.ndarray, k: np.ndarray) -> tuple[float, float]:
    theta = np.array([pi, r])
    interior = (theta > 1e-9) & (theta < 1 - 1e-9)
    if not interior.all():
        # boundary estimates: report zero spread for the pinned parameter
        se = np.zeros(2)
        if interior[0]:
            se[0] = math.sqrt(pi * (1 - pi) / len(n))
        return float(se[0]), float(se[1])
    h = 1e-4 * np.minimum(theta, 1 - theta)
    hess = np.zeros((2, 2))

    def f(t):
        return _mixture_loglik(t[0], t[1], n, k)

    for i in range(2):
        for j in range(2):
            ei = np.eye(2)[i] * h[i]
            ej = np.eye(2)[j] * h[j]
            hess[i, j] = (f(theta + ei + ej) - f(theta + ei - ej) - f(theta - ei + ej) + f(theta - ei - ej)) / (
                4 * h[i] * h[j]
            )
    cov = np.linalg.inv(-hess)
    return float(math.sqrt(max(cov[0, 0], 0.0))), float(math.sqrt(max(cov[1, 1], 0.0)))


def estimate_middle_rates_from_truth(ds: Dataset, tol: float = 1e-12, max_iter: int = 10_000) -> MiddleRateFit:
    """Jointly estimate intrinsic and reporting rates on ground-truth data.

    Each individual either has a middle initial (probability ``intrinsic``)
    shown independently on each publication with probability ``reporting``,
    or never shows one. Individuals who never show an initial are ambiguous;
    the mixture is fitted by expectation maximisation. Standard errors come
    from the observed information matrix.
    """
    n, k = _individual_counts(ds)
    seen = k > 0
    if not seen.any():
        raise InsufficientDataError("no individual ever shows a middle initial")
    pi = float(seen.mean())
    r = float(k[seen].sum() / n[seen].sum())
    it = 0
    for it in range(1, max_iter + 1):
        hidden = np.power(1.0 - r, n[~seen])
        w = np.ones_like(n)
        denom = pi * hidden + (1.0 - pi)
        w[~seen] = np.where(denom > 0, pi * hidden / np.where(denom > 0, denom, 1.0), 0.0)
        new_pi = float(w.mean())
        new_r = float(k.sum() / (w * n).sum())
        done = abs(new_pi - pi) < tol and abs(new_r - r) < tol
        pi, r = new_pi, new_r
        if done:
            break
    pi_se, r_se = _standard_errors(pi, r, n, k)
    return MiddleRateFit(pi, r, pi_se, r_se, len(n), it)


# -- name-frequency distributions ----------------------------------------


def first_author_name_frequencies(
    ds: Dataset, years: Mapping[int, int] | None = None
) -> DiscreteDistribution:
    """Distribution of last-name frequencies among first-listed authors.

    For each year, count how often every last name leads a paper, then take
    the relative histogram "fraction of names seen ``f`` times". The result
    averages those relative histograms over years. Without any year
    information the whole dataset counts as one year.
    """
    per_year = _first_author_counts(ds, years)
    if not per_year:
        raise InsufficientDataError("dataset is empty")
    totals: Counter[int] = Counter()
    for name_counts in per_year.values():
        hist = Counter(name_counts.values())
        n_names = sum(hist.values())
        for f, c in hist.items():
            totals[f] += c / n_names
    n_years = len(per_year)
    support = sorted(totals)
    return DiscreteDistribution(tuple(support), tuple(totals[f] / n_years for f in support))


def _first_author_counts(ds: Dataset, years: Mapping[int, int] | None) -> dict[int, Counter[str]]:
    if years is None:
        years = ds.years
    per_year: dict[int, Counter[str]] = {}
    for paper_id, occs in ds.papers().items():
        year = 0 if years is None else years.get(paper_id, 0)
        per_year.setdefault(year, Counter())[occs[0].last_name] += 1
    return per_year


def name_frequency_slope(
    ds: Dataset,
    years: Mapping[int, int] | None = None,
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE,
    min_count: float | None = MIN_BIN_COUNT,
) -> tuple[float, float]:
    """Fit the power-law slope of first-author last-name frequencies.

    The averaged relative histogram is rescaled to the mean number of names
    per year before binning so that ``min_count`` applies to name counts.
    """
    dist = first_author_name_frequencies(ds, years)
    per_year = _first_author_counts(ds, years)
    names_per_year = sum(len(c) for c in per_year.values()) / len(per_year)
    hist = log_bin_histogram(
        dist.support,
        bins_per_decade,
        weights=[w * names_per_year for w in dist.weights],
        min_count=min_count,
    )
    return fit_power_law_slope(hist)
