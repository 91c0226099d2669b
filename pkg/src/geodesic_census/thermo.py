"""Subshifts of finite type, pressure, and the thermodynamic constants.

Pressure here is always the one-parameter family P(z - s*r) evaluated on a
locally constant roof r: exactly, as z + log of the leading eigenvalue of
the weighted transfer matrix M(s)_ij = A_ij * exp(-s*r_i); or empirically,
as z + the growth rate of the census periodic-orbit sums

    W_n(s) = sum_{p | n} sum_{primitive |gamma| = p} p * exp(-s*(n/p)*ell)

fitted as a linear slope of log W_n against n over a trailing window.

The derived constants all come from the implicit pole curve sigma(z),
defined by z + P(-sigma(z) r) = 0:

    h       = sigma(0)            (topological entropy; P(-h r) = 0)
    A       = sigma'(0)  = 1 / integral of r against the equilibrium
                           state for -h*r     (= -1/P'(-h r))
    sigma^2 = sigma''(0) = P''(-h r) * A^3
    D       = (A/h)^2 - sigma^2/h
    A_tilde = integral of r against the measure of maximal entropy
              (s = 0 equilibrium weights)

sigma', sigma'' are computed by central differences with steps 1e-3 and
5e-4 plus Richardson extrapolation; in exact mode the eigenvector formulas
provide independent estimates that must agree.  Exact-mode arithmetic runs
in extended precision (numpy longdouble) because the relation residual
|sigma^2 - P''A^3| is checked at 1e-8 and a second difference divides the
root-solve noise by 2.5e-7.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (BracketError, DataIntegrityError,
                     EstimateDisagreementError, NonConvergenceError)

__all__ = [
    "MarkovChainSystem", "PressureEvaluator", "ThermoConstants",
    "periodic_point_sum", "solve_entropy", "solve_sigma", "thermo_constants",
    "equilibrium_mean_roof", "eta_partial",
]

LD = np.longdouble
_DEGENERATE_SIGMA2 = 1e-9


@dataclass(frozen=True)
class MarkovChainSystem:
    """Subshift of finite type with a per-state (locally constant) roof."""

    transition: np.ndarray
    roof: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition)
        r = np.asarray(self.roof, dtype=np.float64)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("transition must be a square 0-1 matrix")
        if not np.isin(t, (0, 1)).all():
            raise ValueError("transition entries must be 0 or 1")
        if r.shape != (t.shape[0],):
            raise ValueError("roof must give one positive value per state")
        if not (r > 0).all():
            raise ValueError("roof values must be strictly positive")
        object.__setattr__(self, "transition", t.astype(np.int8))
        object.__setattr__(self, "roof", r)
        if not _is_primitive_matrix(t.astype(bool)):
            raise ValueError("transition matrix must be irreducible and "
                             "aperiodic (some power entrywise positive)")

    @property
    def k(self) -> int:
        return self.transition.shape[0]

    def weighted_matrix(self, s) -> np.ndarray:
        """M(s)_ij = A_ij * exp(-s * roof_i), in extended precision."""
        w = np.exp(LD(-s) * self.roof.astype(LD))
        return self.transition.astype(LD) * w[:, None]

    def describe(self) -> str:
        roof = ",".join(f"{v:g}" for v in self.roof)
        flat = "".join(str(int(v)) for v in self.transition.ravel())
        return f"sft(k={self.k};roof=[{roof}];transition={flat})"

    @classmethod
    def full_shift(cls, roof) -> "MarkovChainSystem":
        k = len(roof)
        return cls(np.ones((k, k), dtype=np.int8), np.asarray(roof, float))

    @classmethod
    def from_json(cls, path) -> "MarkovChainSystem":
        """Spec file: {"k": int, "transition": row-major 0/1 list, "roof": [...]}"""
        with open(path) as fh:
            doc = json.load(fh)
        k = int(doc["k"])
        t = np.asarray(doc["transition"], dtype=np.int8).reshape(k, k)
        return cls(t, np.asarray(doc["roof"], dtype=np.float64))


def _is_primitive_matrix(t: np.ndarray) -> bool:
    k = t.shape[0]
    power = t.copy()
    # Wielandt bound: primitive iff A^(k^2 - 2k + 2) is entrywise positive
    for _ in range(max(1, k * k - 2 * k + 2) - 1):
        if power.all():
            return True
        power = (power @ t) > 0
    return bool(power.all())


def _power_iteration(M: np.ndarray, tol=None, max_iter=20000):
    """Leading eigenvalue and left/right eigenvectors, extended precision.

    Plain normalized iteration (Perron theory guarantees a dominant simple
    eigenvalue for primitive nonnegative input) followed by a two-sided
    Rayleigh quotient, whose error is quadratic in the iterate residual.
    """
    k = M.shape[0]
    if tol is None:
        tol = LD(50) * np.finfo(LD).eps
    v = np.full(k, LD(1) / k)
    u = np.full(k, LD(1) / k)
    lam_prev = LD(0)
    Mt = M.T.copy()
    for it in range(max_iter):
        v_new = M @ v
        u_new = Mt @ u
        lam = v_new.sum() / v.sum()
        v = v_new / v_new.sum()
        u = u_new / u_new.sum()
        if it > 4 and abs(lam - lam_prev) <= tol * abs(lam):
            break
        lam_prev = lam
    else:
        raise NonConvergenceError("power iteration failed to converge")
    lam = (u @ (M @ v)) / (u @ v)
    return lam, u, v


@dataclass
class PressureEvaluator:
    """P(z - s r) exactly (spectral) or from a census (orbit-sum slopes).

    Exact mode wraps a MarkovChainSystem; census mode wraps a Census and a
    fit window of word lengths (default: the top five).  Census evaluations
    also return the standard error of the fitted slope.
    """

    system: MarkovChainSystem | None = None
    census: object | None = None
    fit_window: tuple[int, ...] | None = None
    tolerance: float = 1e-12
    _census_terms: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if (self.system is None) == (self.census is None):
            raise ValueError("exactly one of system/census must be given")
        if self.census is not None:
            if self.fit_window is None:
                top = self.census.n_max
                lo = max(1, top - 4)
                self.fit_window = tuple(range(lo, top + 1))
            if len(self.fit_window) < 3:
                raise ValueError("census fit window needs >= 3 lengths")
            if max(self.fit_window) > self.census.n_max:
                raise ValueError("fit window exceeds census n_max")
            self.tolerance = max(self.tolerance, 1e-10)
            self._prepare_census_terms()

    @property
    def mode(self) -> str:
        return "exact" if self.system is not None else "census"

    # -- census internals ---------------------------------------------------

    def _prepare_census_terms(self):
        by_n = self.census.primitive_ells_by_n()
        for n in self.fit_window:
            vals, logw = [], []
            for p in range(1, n + 1):
                if n % p or len(by_n.get(p, ())) == 0:
                    continue
                vals.append((n / p) * by_n[p])
                logw.append(np.full(len(by_n[p]), math.log(p)))
            if not vals:
                raise DataIntegrityError(f"census has no classes at n={n}")
            self._census_terms[n] = (np.concatenate(vals),
                                     np.concatenate(logw))

    def _log_orbit_sum(self, n: int, s: float):
        vals, logw = self._census_terms[n]
        x = logw - s * vals
        mx = x.max()
        ex = np.exp(x - mx)
        total = ex.sum()
        logsum = mx + math.log(total)
        mean_val = float((ex @ vals) / total)  # d/d(-s) of logsum
        return logsum, mean_val

    def _census_fit(self, s: float):
        ns = np.array(self.fit_window, dtype=np.float64)
        ys = np.zeros(len(ns))
        dys = np.zeros(len(ns))
        for i, n in enumerate(self.fit_window):
            ys[i], dys[i] = self._log_orbit_sum(int(n), s)
        X = np.vstack([ns, np.ones_like(ns)]).T
        coef, *_ = np.linalg.lstsq(X, ys, rcond=None)
        resid = ys - X @ coef
        dof = max(len(ns) - 2, 1)
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(X.T @ X)
        # slope of the fitted line, its stderr, and d(slope)/ds
        hat = np.linalg.solve(X.T @ X, X.T)
        dslope_ds = float(hat[0] @ (-dys))
        return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0))), dslope_ds

    # -- public evaluations ---------------------------------------------------

    def pressure(self, s: float, z: float = 0.0) -> float:
        """P(z - s r): exact log-eigenvalue or census fit slope."""
        if self.system is not None:
            lam, _, _ = _power_iteration(self.system.weighted_matrix(s))
            return float(z + np.log(lam))
        slope, _, _ = self._census_fit(s)
        return z + slope

    def pressure_with_stderr(self, s: float, z: float = 0.0):
        if self.system is not None:
            return self.pressure(s, z), 0.0
        slope, se, _ = self._census_fit(s)
        return z + slope, se

    def pressure_derivative(self, s: float) -> float:
        """d/ds P(-s r); equals -mean roof under the s-equilibrium weights."""
        if self.system is not None:
            return -float(equilibrium_mean_roof(self.system, s))
        _, _, dp = self._census_fit(s)
        return dp


def periodic_point_sum(system: MarkovChainSystem, n: int, s, z=0.0):
    """log sum over n-periodic points of exp(z*n - s * r^n(x)).

    Uses tr(M(s)^n) with scaling, so any n is fine; for complex s the
    complex logarithm of the trace is returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(s, complex):
        w = np.exp(-s * np.asarray(system.roof, dtype=np.complex128))
        M = system.transition.astype(np.complex128) * w[:, None]
        scale = np.abs(M).max()
        logdet = 0.0
        P = M / scale
        acc = None
        for _ in range(n):
            acc = P if acc is None else acc @ P
        tr = np.trace(acc)
        return complex(z * n + n * np.log(scale) + np.log(tr))
    M = system.weighted_matrix(s)
    scale = LD(M.max())
    P = M / scale
    acc = None
    for _ in range(n):
        acc = P if acc is None else acc @ P
    tr = np.trace(acc)
    if tr <= 0:
        raise DataIntegrityError("no periodic points at this length")
    return float(LD(z) * n + n * np.log(scale) + np.log(tr))


def equilibrium_mean_roof(system: MarkovChainSystem, s: float) -> float:
    """integral of the roof against the equilibrium state for -s*r.

    Eigenvector weights p_i proportional to u_i v_i; agrees with -dP/ds to
    machine accuracy (checked in the tests by central differences).
    """
    _, u, v = _power_iteration(system.weighted_matrix(s))
    w = u * v
    w = w / w.sum()
    return float(w @ system.roof.astype(LD))


def _bracket_root(f, lo, hi, expand_hi=True, max_expand=60):
    flo, fhi = f(lo), f(hi)
    for _ in range(max_expand):
        if flo > 0 > fhi:
            return lo, hi, flo, fhi
        if fhi > 0 and expand_hi:
            hi *= 2.0
            fhi = f(hi)
        elif flo < 0:
            lo = lo - max(1.0, abs(lo))
            flo = f(lo)
        else:
            break
    if flo > 0 > fhi:
        return lo, hi, flo, fhi
    raise BracketError(f"could not bracket root in [{lo}, {hi}]")


def _solve_decreasing(f, fprime, lo, hi, tol):
    """Root of a strictly decreasing function: bisection then Newton polish."""
    lo, hi, flo, fhi = _bracket_root(f, lo, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm > 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo < 1e-6 * max(1.0, abs(mid)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(60):
        fx = f(x)
        dfx = fprime(x)
        if dfx == 0:
            break
        step = fx / dfx
        x_new = x - step
        if not (lo - 1.0 <= x_new <= hi + 1.0):
            x_new = 0.5 * (lo + hi)
        if abs(fx) <= tol and abs(x_new - x) <= 1e-15 * max(1.0, abs(x)):
            return x_new
        x = x_new
    if abs(f(x)) > max(tol, 1e-9):
        raise NonConvergenceError(f"root polish stalled at residual {f(x):.3g}")
    return x


def solve_entropy(pe: PressureEvaluator) -> float:
    """h with P(-h r) = 0, by bracketed bisection plus Newton polish.

    Monotonicity of s -> P(-s r) (strict, since the roof is positive) is
    verified on the bracket; non-monotone samples abort.
    """
    f = lambda s: pe.pressure(s)
    p0, p1 = f(0.0), f(0.5)
    if p0 <= p1 - 1e-12:
        raise DataIntegrityError("pressure is not decreasing in s")
    tol = pe.tolerance if pe.mode == "exact" else 1e-10
    return _solve_decreasing(f, pe.pressure_derivative, 0.0, 1.0, tol)


def solve_sigma(pe: PressureEvaluator, z: float,
                delta_num: float = 0.1) -> float:
    """sigma(z): the unique s with z + P(-s r) = 0; sigma(0) = h.

    |z| beyond delta_num (default 0.1) is refused up front; bracketing
    failures inside the window also raise BracketError.
    """
    if abs(z) > delta_num:
        raise BracketError(f"|z|={abs(z):g} outside allowed window "
                           f"{delta_num:g}")
    f = lambda s: z + pe.pressure(s)
    tol = pe.tolerance if pe.mode == "exact" else 1e-10
    return _solve_decreasing(f, pe.pressure_derivative, 0.0, 1.0, tol)


_FD_STEPS = (1e-3, 5e-4)


def _richardson_first(fvals, h1, h2):
    d1 = (fvals[h1] - fvals[-h1]) / (2 * h1)
    d2 = (fvals[h2] - fvals[-h2]) / (2 * h2)
    return (4 * d2 - d1) / 3


def _richardson_second(fvals, f0, h1, h2):
    c1 = (fvals[h1] - 2 * f0 + fvals[-h1]) / h1**2
    c2 = (fvals[h2] - 2 * f0 + fvals[-h2]) / h2**2
    return (4 * c2 - c1) / 3


@dataclass
class ThermoConstants:
    """The constant pack {h, A, sigma2, D, A_tilde} plus diagnostics."""

    h: float
    A: float
    sigma2: float
    D: float
    A_tilde: float
    degenerate: bool
    quasi_power: dict
    residuals: dict
    method: dict

    def to_dict(self) -> dict:
        return {
            "h": self.h, "A": self.A, "sigma2": self.sigma2, "D": self.D,
            "A_tilde": self.A_tilde, "degenerate": self.degenerate,
            "quasi_power": self.quasi_power, "residuals": self.residuals,
            "method": self.method,
        }


def thermo_constants(pe: PressureEvaluator,
                     agreement_tolerance: float = 1e-6) -> ThermoConstants:
    """Compute h, A = sigma'(0), sigma2 = sigma''(0), D, A_tilde.

    First derivatives come from central differences of solve_sigma with
    Richardson extrapolation (steps 1e-3, 5e-4).  In exact mode the
    eigenvector route (A = 1/mean roof at s=h, sigma2 = P''(-hr) A^3 with
    P'' from differences of the analytic P') independently recomputes both;
    disagreement beyond 10x the tolerance is a hard failure.
    """
    h = solve_entropy(pe)
    h1, h2 = _FD_STEPS
    sig = {dz: solve_sigma(pe, dz) for dz in (h1, -h1, h2, -h2)}
    A = _richardson_first(sig, h1, h2)
    sigma2 = _richardson_second(sig, h, h1, h2)
    if abs(sigma2) < _DEGENERATE_SIGMA2:
        sigma2 = abs(sigma2)
    D = (A / h) ** 2 - sigma2 / h

    # P''(-hr) from central differences of P' (eigenvector-exact in exact
    # mode), for the relation residual sigma2 = P'' A^3
    dP = {dz: pe.pressure_derivative(h + dz) for dz in (h1, -h1, h2, -h2)}
    Ppp = _richardson_first(dP, h1, h2)
    residuals = {
        "sigma2_vs_PppA3": abs(sigma2 - Ppp * A**3),
        "D_identity": abs(D - ((A / h) ** 2 - sigma2 / h)),
    }
    method = {
        "mode": pe.mode,
        "fd_steps": list(_FD_STEPS),
        "richardson": True,
        "window": list(pe.fit_window) if pe.fit_window else None,
    }
    if pe.system is not None:
        mean_roof = equilibrium_mean_roof(pe.system, h)
        A_check = 1.0 / mean_roof
        sigma2_check = Ppp * A_check**3
        residuals["A_vs_eigenvector"] = abs(A - A_check)
        residuals["sigma2_vs_eigenvector"] = abs(sigma2 - sigma2_check)
        if abs(A - A_check) > 10 * agreement_tolerance:
            raise EstimateDisagreementError(
                f"A estimates diverge: fd={A!r} eigen={A_check!r}")
        if abs(sigma2 - sigma2_check) > 10 * agreement_tolerance:
            raise EstimateDisagreementError(
                f"sigma2 estimates diverge: fd={sigma2!r} "
                f"eigen={sigma2_check!r}")
        A_tilde = equilibrium_mean_roof(pe.system, 0.0)
    else:
        # growth rate of mean roof per symbol at the maximal-entropy
        # weighting: -dP/ds at s=0 on the census estimator
        A_tilde = -pe.pressure_derivative(0.0)
    degenerate = sigma2 < _DEGENERATE_SIGMA2
    quasi_power = {
        "U1": A, "U2": sigma2, "V1": -A / h, "V2": D,
        "beta_T": "T", "kappa_T": "T",
    }
    return ThermoConstants(h, A, sigma2, D, A_tilde, degenerate, quasi_power,
                           residuals, method)


def eta_partial(pe: PressureEvaluator, s: float, N: int):
    """Truncated generating-function sums up to length N, both weightings.

    Returns (plain, n_weighted, last_increment): plain sums periodic points
    exp(-s r^n) over n <= N; n_weighted applies the extra factor n to class
    sums (directed, not necessarily prime), the convention that counts each
    closed geodesic once.  The finitely many exceptional orbits of the
    geometric coding are not corrected for (metadata notes this).  For
    s <= h the series diverges as N grows; a warning is issued and the
    partial sums are still returned (diagnostic use).
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    href = solve_entropy(pe)
    if s <= href:
        warnings.warn(f"eta partial sums at s={s:g} <= h={href:.6g} are in "
                      "the divergent region", stacklevel=2)
    plain = 0.0
    weighted = 0.0
    last = 0.0
    if pe.system is not None:
        cls_sums = _class_sums_exact(pe.system, s, N)
        for n in range(1, N + 1):
            inc = math.exp(periodic_point_sum(pe.system, n, s))
            plain += inc
            weighted += n * cls_sums[n]
            last = inc
    else:
        by_n = pe.census.primitive_ells_by_n()
        if N > pe.census.n_max:
            raise ValueError("N exceeds census n_max")
        for n in range(1, N + 1):
            inc = 0.0
            wsum = 0.0
            for p in range(1, n + 1):
                if n % p or len(by_n.get(p, ())) == 0:
                    continue
                e = np.exp(-s * (n / p) * by_n[p])
                inc += float(p * e.sum())
                wsum += float(e.sum())
            plain += inc
            weighted += n * wsum
            last = inc
    return plain, weighted, last


def _class_sums_exact(system: MarkovChainSystem, s: float, N: int):
    """sum over classes with |gamma| = n of exp(-s l(gamma)), n <= N.

    Obtained from primitive-orbit sums Q(p, m) = sum over primitive orbits
    of length p of exp(-s m ell), extracted recursively from traces of
    M(m s)^p: tr = sum_{d | p} d Q(d, m p / d).
    """
    Q: dict[tuple[int, int], float] = {}

    def trace_val(mult: int, p: int) -> float:
        return math.exp(periodic_point_sum(system, p, mult * s))

    for p in range(1, N + 1):
        for m in range(1, N // p + 1):
            t = trace_val(m, p)
            rest = sum(d * Q[(d, m * (p // d))]
                       for d in range(1, p) if p % d == 0)
            Q[(p, m)] = (t - rest) / p
    out = {n: 0.0 for n in range(1, N + 1)}
    for n in range(1, N + 1):
        out[n] = sum(Q[(p, n // p)] for p in range(1, n + 1) if n % p == 0)
    return out
