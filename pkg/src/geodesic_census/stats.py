"""Census-driven statistics: counting, averages, variance growth, central
and local limit profiles, word-ordered statistics, moment generating sums.

Ordering conventions.  T-ordered statistics run over directed prime classes
with l(gamma) < T (strict), refusing T beyond the census cutoff.  Word-
ordered statistics run over directed prime classes with |gamma| = n.

Kolmogorov-Smirnov convention.  Word lengths are integers (and synthetic
roof sums may be), so the empirical distributions are lattice distributions:
against a continuous Gaussian the classical two-sided KS distance is floored
by half the largest atom mass no matter how large the census.  When the
sample is lattice-valued the reported `ks` therefore compares the empirical
CDF to the model CDF at the lattice midpoints (window boundaries), which is
the quantity the local-limit window framing actually controls; the classical
two-sided value is always reported alongside as `ks_classical`.  For
non-lattice samples the two definitions coincide (`ks` is classical).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import ndtr

from .errors import (CutoffExceededError, DegenerateVarianceError,
                     EmptyWindowError, InsufficientDataError)

__all__ = [
    "li", "count_pi", "average_word_length", "ratio_average",
    "variance_word_length", "clt_empirical", "llt_profile",
    "moment_generating", "word_ordered_stats", "default_variance_grid",
]

MIN_VARIANCE_SAMPLES = 30
MIN_CLT_SAMPLES = 100
_DEGENERATE_SIGMA2 = 1e-9
_LATTICE_TOL = 1e-9


def li(x: float) -> float:
    """Offset logarithmic integral li(x) = int_2^x du/log(u), x >= 2.

    Adaptive quadrature on the substituted integrand e^v/v over
    [log 2, log x]; relative error better than 1e-10.
    """
    if x < 2.0:
        raise ValueError(f"li(x) requires x >= 2, got {x!r}")
    if x == 2.0:
        return 0.0
    val, _ = quad(lambda v: math.exp(v) / v, math.log(2.0), math.log(x),
                  epsabs=0.0, epsrel=1e-12, limit=200)
    return float(val)


def _require_certified(census, T: float):
    if not (T <= census.T_cert + 1e-12):
        raise CutoffExceededError(
            f"T={T:g} exceeds certified cutoff T_cert={census.T_cert:.6g}")


def _prime_words_below(census, T: float):
    """Word lengths of directed prime classes with ell < T."""
    mask = census.prime & (census.ell < T)
    return census.n[mask].astype(np.float64)


def count_pi(census, T: float) -> int:
    """pi(T): directed prime classes with l(gamma) < T (strict)."""
    _require_certified(census, T)
    return int(np.searchsorted(census.prime_ell_sorted, T, side="left"))


def _is_lattice(values: np.ndarray) -> bool:
    return bool(np.abs(values - np.round(values)).max() < _LATTICE_TOL)


def _ks_classical(sorted_samples: np.ndarray, cdf: np.ndarray) -> float:
    n = len(sorted_samples)
    up = (np.arange(1, n + 1) / n - cdf).max()
    dn = (cdf - np.arange(0, n) / n).max()
    return float(max(up, dn))


def _ks_lattice(raw_sorted: np.ndarray, model_cdf_at) -> float:
    """sup |ECDF - model| over lattice midpoints (see module docstring)."""
    lo, hi = int(round(raw_sorted[0])), int(round(raw_sorted[-1]))
    bounds = np.arange(lo, hi + 1) + 0.5
    ecdf = np.searchsorted(raw_sorted, bounds, side="left") / len(raw_sorted)
    return float(np.abs(ecdf - model_cdf_at(bounds)).max())


# ---------------------------------------------------------------------------
# averages

@dataclass
class AverageReport:
    T: float
    pi_T: int
    empirical_mean: float
    model_value: float
    ratio: float
    elementary_model: float   # A*T + A/h
    A: float
    h: float

    def to_dict(self):
        return self.__dict__.copy()


def average_word_length(census, T: float, constants) -> AverageReport:
    """Empirical mean |gamma| over {l < T} against (A/h) e^{hT}/li(e^{hT})."""
    _require_certified(census, T)
    words = _prime_words_below(census, T)
    if len(words) == 0:
        raise EmptyWindowError(f"no prime classes below T={T:g}")
    A, h = constants.A, constants.h
    model = (A / h) * math.exp(h * T) / li(math.exp(h * T))
    mean = float(words.mean())
    return AverageReport(T, len(words), mean, model, mean / model,
                         A * T + A / h, A, h)


def ratio_average(census, T: float) -> float:
    """(1/pi(T)) sum over {l < T} of |gamma| / l(gamma)."""
    _require_certified(census, T)
    mask = census.prime & (census.ell < T)
    if not mask.any():
        raise EmptyWindowError(f"no prime classes below T={T:g}")
    return float((census.n[mask] / census.ell[mask]).mean())


# ---------------------------------------------------------------------------
# variance growth

@dataclass
class VarianceReport:
    T_grid: list
    pi_grid: list
    var_grid: list
    sigma2_hat: float
    D_hat: float
    r2: float
    slope_stderr: float
    weights: str

    def to_dict(self):
        return self.__dict__.copy()

    def rows(self):
        return [{"T": t, "pi": p, "var": v}
                for t, p, v in zip(self.T_grid, self.pi_grid, self.var_grid)]


def default_variance_grid(census, points: int = 10) -> np.ndarray:
    """Top-half grid for the variance fit.

    Lattice censuses get half-integer points (one per populated length
    shell, avoiding staircase duplicates); otherwise a uniform grid over
    [T_cert/2, T_cert].
    """
    Tc = census.T_cert
    if _is_lattice(census.ell):
        k0 = int(Tc // 2) + 1
        grid = np.arange(k0, int(np.ceil(Tc))) + 0.5
        return grid[grid <= Tc]
    return np.linspace(0.5 * Tc, Tc, points)


def variance_word_length(census, T_grid, weights: str = "unit") -> VarianceReport:
    """Variance of |gamma| over {l < T} per T, with a weighted linear fit.

    Var_T is fitted as sigma2*T + D by least squares; `weights` is "unit"
    or "pi" (pi(T)-proportional).  Nested windows make the Var_T estimates
    strongly correlated, which in practice biases pi-weighted slopes low;
    unit weights are the default.
    """
    T_grid = np.asarray(T_grid, dtype=np.float64)
    ys, ws, pis = [], [], []
    for T in T_grid:
        _require_certified(census, float(T))
        words = _prime_words_below(census, float(T))
        if len(words) < MIN_VARIANCE_SAMPLES:
            raise InsufficientDataError(
                f"pi({T:g}) = {len(words)} < {MIN_VARIANCE_SAMPLES}")
        ys.append(float(words.var()))
        pis.append(len(words))
        ws.append(float(len(words)) if weights == "pi" else 1.0)
    ys = np.array(ys)
    ws = np.array(ws)
    X = np.vstack([T_grid, np.ones_like(T_grid)]).T
    WX = X * ws[:, None]
    coef = np.linalg.solve(X.T @ WX, WX.T @ ys)
    fit = X @ coef
    dof = max(len(ys) - 2, 1)
    s2 = float(ws @ (ys - fit) ** 2) / dof
    cov = s2 * np.linalg.inv(X.T @ WX)
    ybar = float(ws @ ys / ws.sum())
    ss_res = float(ws @ (ys - fit) ** 2)
    ss_tot = float(ws @ (ys - ybar) ** 2)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    return VarianceReport(list(map(float, T_grid)), pis, list(map(float, ys)),
                          float(coef[0]), float(coef[1]), float(r2),
                          float(math.sqrt(max(cov[0, 0], 0.0))), weights)


# ---------------------------------------------------------------------------
# central limit profile

@dataclass
class CltReport:
    T: float
    pi_T: int
    A: float
    sigma2: float
    ks: float
    ks_classical: float
    lattice: bool
    table: list = field(repr=False)      # rows: x, ecdf, model_cdf
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        d = self.__dict__.copy()
        d["table"] = None  # tables go to CSV, not JSON
        return d

    def rows(self):
        return [{"x": x, "ecdf": e, "model_cdf": m} for x, e, m in self.table]


def clt_empirical(census, T: float, A: float, sigma2: float) -> CltReport:
    """Empirical CDF of (|gamma| - A T)/sqrt(T) against Normal(0, sigma2).

    The `diagnostics` field carries the shape-only comparison (samples
    standardized by their empirical mean and sd against a standard normal),
    which isolates Gaussianity from the finite-T drift of the mean and
    variance; it is not part of the stated model comparison.
    """
    _require_certified(census, T)
    if sigma2 <= _DEGENERATE_SIGMA2:
        raise DegenerateVarianceError(f"sigma2={sigma2:g} is degenerate")
    words = _prime_words_below(census, T)
    if len(words) < MIN_CLT_SAMPLES:
        raise InsufficientDataError(
            f"pi({T:g}) = {len(words)} < {MIN_CLT_SAMPLES}")
    words.sort()
    sig = math.sqrt(sigma2)
    sqT = math.sqrt(T)
    samples = (words - A * T) / sqT
    model = ndtr(samples / sig)
    ks_classical = _ks_classical(samples, model)
    lattice = True  # word lengths are integers
    ks = _ks_lattice(words, lambda b: ndtr((b - A * T) / sqT / sig))
    # shape-only diagnostic
    mu, sd = float(words.mean()), float(words.std())
    ks_shape = _ks_lattice(words, lambda b: ndtr((b - mu) / sd)) if sd > 0 \
        else float("nan")
    xs = np.unique(samples)
    ecdf = np.searchsorted(samples, xs, side="right") / len(samples)
    table = [(float(x), float(e), float(ndtr(x / sig)))
             for x, e in zip(xs, ecdf)]
    diag = {"empirical_mean_minus_AT": mu - A * T,
            "empirical_var_over_T": sd * sd / T,
            "ks_shape": ks_shape}
    return CltReport(T, len(words), A, sigma2, ks, ks_classical, lattice,
                     table, diag)


# ---------------------------------------------------------------------------
# local limit profile

@dataclass
class LltReport:
    T: float
    pi_T: int
    A: float
    sigma2: float
    x: list
    frequency: list
    model_density: list
    scaled_frequency: list    # sqrt(T) * frequency
    frequency_sum: float
    central_x: float
    central_scaled: float
    central_target: float     # 1 / (sqrt(2 pi) sigma)

    def to_dict(self):
        d = {k: v for k, v in self.__dict__.items()
             if k not in ("x", "frequency", "model_density",
                          "scaled_frequency")}
        return d

    def rows(self):
        return [{"x": a, "frequency": b, "model_density": c,
                 "scaled_frequency": d}
                for a, b, c, d in zip(self.x, self.frequency,
                                      self.model_density,
                                      self.scaled_frequency)]


def llt_profile(census, T: float, A: float, sigma2: float,
                x_grid=None) -> LltReport:
    """Unit-window frequencies of |gamma| - A T against the local Gaussian.

    Window at x collects classes with x - 1/2 < |gamma| - A T <= x + 1/2.
    The default grid places one window per integer word length, so the
    frequencies partition the census and sum to exactly 1.
    """
    _require_certified(census, T)
    if sigma2 <= _DEGENERATE_SIGMA2:
        raise DegenerateVarianceError(f"sigma2={sigma2:g} is degenerate")
    words = _prime_words_below(census, T)
    if len(words) < MIN_CLT_SAMPLES:
        raise InsufficientDataError(
            f"pi({T:g}) = {len(words)} < {MIN_CLT_SAMPLES}")
    words.sort()
    if x_grid is None:
        jmin, jmax = int(words[0]), int(words[-1])
        x_grid = np.arange(jmin, jmax + 1) - A * T
    else:
        x_grid = np.asarray(x_grid, dtype=np.float64)
    sig = math.sqrt(sigma2)
    freqs, models = [], []
    for x in x_grid:
        lo = x + A * T - 0.5
        hi = x + A * T + 0.5
        cnt = (np.searchsorted(words, hi, side="right")
               - np.searchsorted(words, lo, side="right"))
        freqs.append(cnt / len(words))
        models.append(math.exp(-x * x / (2 * sigma2 * T))
                      / (sig * math.sqrt(2 * math.pi * T)))
    freqs = np.array(freqs)
    scaled = freqs * math.sqrt(T)
    ci = int(np.abs(x_grid).argmin())
    return LltReport(T, len(words), A, sigma2,
                     [float(v) for v in x_grid], [float(v) for v in freqs],
                     [float(v) for v in models], [float(v) for v in scaled],
                     float(freqs.sum()), float(x_grid[ci]), float(scaled[ci]),
                     1.0 / (math.sqrt(2 * math.pi) * sig))


# ---------------------------------------------------------------------------
# moment generating functions

def moment_generating(census, z, T: float | None = None,
                      n: int | None = None):
    """log C_z(T) (classes ordered by length) or log E_z(n) (by word length).

    C mode: log sum over {prime, l < T} of exp(z |gamma|).
    E mode: log sum over {prime, |gamma| = n} of exp(z l(gamma)).
    Exactly one of T and n must be given.  Complex z is allowed; the
    principal complex logarithm is returned then.
    """
    if (T is None) == (n is None):
        raise ValueError("give exactly one of T (C mode) or n (E mode)")
    if T is not None:
        _require_certified(census, T)
        mask = census.prime & (census.ell < T)
        values = census.n[mask].astype(np.float64)
    else:
        if n > census.n_max:
            raise CutoffExceededError(f"n={n} exceeds census n_max")
        mask = census.prime & (census.n == n)
        values = census.ell[mask]
    if not mask.any():
        raise EmptyWindowError("empty moment-generating window")
    if isinstance(z, complex):
        x = z * values
        shift = x.real.max()
        return complex(shift + np.log(np.exp(x - shift).sum()))
    x = z * values
    shift = x.max()
    return float(shift + np.log(np.exp(x - shift).sum()))


# ---------------------------------------------------------------------------
# word-ordered statistics

@dataclass
class WordStatsReport:
    n: int
    count_n: int
    n_grid: list
    counts: list
    mean_l: list
    var_l: list
    A_tilde: float
    mean_at_n_over_n: float
    a_coefficients: list      # a0..a3 from the 1/n expansion fit
    sigma_tilde2_hat: float   # slope of var_l against n
    var_slope_r2: float
    ks: float
    ks_classical: float
    lattice: bool

    def to_dict(self):
        return self.__dict__.copy()

    def rows(self):
        return [{"n": a, "count": b, "mean_l": c, "var_l": d}
                for a, b, c, d in zip(self.n_grid, self.counts, self.mean_l,
                                      self.var_l)]


def word_ordered_stats(census, n: int, constants,
                       n_grid=None) -> WordStatsReport:
    """Statistics over prime classes ordered by word length.

    Reports mean and variance of l(gamma) on a grid of word lengths, the
    a0..a3 expansion fit of mean(l)/n against {1, 1/n, 1/n^2, 1/n^3}, the
    variance slope (word-ordered variance estimate), and the KS distance of
    (l - A_tilde n)/sqrt(n) at the target n against Normal(0, slope).
    """
    if n > census.n_max:
        raise CutoffExceededError(f"n={n} exceeds census n_max")
    if n_grid is None:
        n_grid = [k for k in range(max(2, n - 12), n + 1)]
    counts, mean_l, var_l, grid = [], [], [], []
    for k in n_grid:
        mask = census.prime & (census.n == k)
        if not mask.any():
            continue
        ells = census.ell[mask]
        grid.append(int(k))
        counts.append(int(mask.sum()))
        mean_l.append(float(ells.mean()))
        var_l.append(float(ells.var()))
    if len(grid) < 4:
        raise InsufficientDataError("need at least 4 populated word lengths")
    ns = np.array(grid, dtype=np.float64)
    y = np.array(mean_l) / ns
    X = np.vstack([np.ones_like(ns), 1 / ns, 1 / ns**2, 1 / ns**3]).T
    a_coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    Xv = np.vstack([ns, np.ones_like(ns)]).T
    v_coef, *_ = np.linalg.lstsq(Xv, np.array(var_l), rcond=None)
    fit = Xv @ v_coef
    ss_res = float(((var_l - fit) ** 2).sum())
    ss_tot = float(((var_l - np.mean(var_l)) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float("nan")
    sigma_t2 = float(v_coef[0])

    mask = census.prime & (census.n == n)
    ells = np.sort(census.ell[mask])
    if len(ells) == 0:
        raise EmptyWindowError(f"no prime classes at n={n}")
    count_n = len(ells)
    A_t = constants.A_tilde
    ks = ks_classical = float("nan")
    lattice = _is_lattice(ells)
    if count_n >= MIN_VARIANCE_SAMPLES and sigma_t2 > _DEGENERATE_SIGMA2:
        sig = math.sqrt(sigma_t2)
        sqn = math.sqrt(n)
        samples = (ells - A_t * n) / sqn
        ks_classical = _ks_classical(samples, ndtr(samples / sig))
        if lattice:
            ks = _ks_lattice(ells,
                             lambda b: ndtr((b - A_t * n) / sqn / sig))
        else:
            ks = ks_classical
    return WordStatsReport(n, count_n, grid, counts, mean_l, var_l,
                           float(A_t), float(ells.mean() / n),
                           [float(v) for v in a_coef], sigma_t2, float(r2),
                           float(ks), float(ks_classical), lattice)
