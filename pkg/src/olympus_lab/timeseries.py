"""Random walks on rule space and a small Box-Jenkins toolkit for their fitness series.

The estimators follow textbook definitions: sample autocorrelation with the
full-series mean and variance, partial autocorrelation by Durbin-Levinson,
and ARMA(p, q) fitted by conditional sum of squares.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import signal, stats

from . import rng
from .ca import TABLE_SIZE, evaluate_many
from .errors import DegenerateVariance, DomainError, NonConvergence
from .rules import OLYMPUS
from .sampling import Space, random_rule


class NonStationary(UserWarning):
    pass


class NonInvertible(UserWarning):
    pass


@dataclass(frozen=True)
class WalkTrace:
    values: np.ndarray
    space: str = "full"
    seed: object = None
    ics: int = 0
    rules: tuple = field(default=(), repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("a walk trace needs at least two values")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


def _values(trace) -> np.ndarray:
    if isinstance(trace, WalkTrace):
        return trace.values
    return np.asarray(trace, float)


def random_walk(space: Space | str, length: int, ics: int, seed,
                max_steps: int | None = None, keep_rules: bool = False) -> WalkTrace:
    """Random walk of ``length`` points; each step flips one admissible bit.

    In the Olympus only the free positions of the schema are flipped, so the
    walk never leaves the subspace.  Every point is evaluated on fresh ICs.
    """
    space = Space(space)
    if length < 2:
        raise ValueError("length must be >= 2")
    gen = rng.generator(seed, "walk", 0)
    allowed = OLYMPUS.free_positions if space is Space.OLYMPUS else np.arange(TABLE_SIZE)
    cur = random_rule(space, gen)
    path = [cur]
    picks = gen.integers(0, allowed.size, length - 1)
    for b in picks:
        cur = cur.flip(int(allowed[b]))
        path.append(cur)
    seeds = [rng.seed_sequence(seed, "walk", 1, t) for t in range(length)]
    fit = evaluate_many(path, ics, seeds, max_steps)
    return WalkTrace(np.array([e.value for e in fit]), space.value, seed, ics,
                     tuple(path) if keep_rules else ())


# -- correlograms -------------------------------------------------------------

@dataclass(frozen=True)
class Correlogram:
    """Values at lags ``0..max_lag`` with the two-standard-error band ``2/sqrt(L)``."""
    values: np.ndarray
    band: float

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _acf_values(y: np.ndarray, max_lag: int) -> np.ndarray:
    d = y - y.mean()
    den = float(d @ d)
    if den == 0 or not np.isfinite(den):
        raise DegenerateVariance("constant series has no autocorrelation")
    L = y.size
    r = np.empty(max_lag + 1)
    r[0] = 1.0
    for k in range(1, max_lag + 1):
        r[k] = float(d[:L - k] @ d[k:]) / den
    return r


def _check_lag(L: int, max_lag: int | None) -> int:
    if max_lag is None:
        max_lag = min(L - 1, max(10, int(10 * math.log10(L))))
    if not 0 <= max_lag < L:
        raise ValueError(f"max_lag must lie in [0, {L - 1}]")
    return max_lag


def acf(trace, max_lag: int | None = None) -> Correlogram:
    """Sample autocorrelation ``r(k) = sum (y_t - m)(y_{t+k} - m) / sum (y_t - m)^2``."""
    y = _values(trace)
    max_lag = _check_lag(y.size, max_lag)
    return Correlogram(_acf_values(y, max_lag), 2.0 / math.sqrt(y.size))


def durbin_levinson(r: np.ndarray) -> np.ndarray:
    """Partial autocorrelations from autocorrelations ``r[0..K]`` (``r[0] = 1``)."""
    K = r.size - 1
    out = np.empty(K + 1)
    out[0] = 1.0
    if K == 0:
        return out
    phi = np.zeros(K + 1)
    phi[1] = r[1]
    out[1] = r[1]
    v = 1.0 - r[1] ** 2
    for k in range(2, K + 1):
        if v <= 0:
            out[k:] = 0.0
            break
        a = (r[k] - phi[1:k] @ r[k - 1:0:-1]) / v
        phi[1:k] = phi[1:k] - a * phi[k - 1:0:-1]
        phi[k] = a
        out[k] = a
        v *= 1.0 - a * a
    return out


def pacf(trace, max_lag: int | None = None) -> Correlogram:
    y = _values(trace)
    max_lag = _check_lag(y.size, max_lag)
    return Correlogram(durbin_levinson(_acf_values(y, max_lag)), 2.0 / math.sqrt(y.size))


def band_crossing(r: np.ndarray, band: float, run: int = 5) -> int | None:
    """First lag from which ``r`` stays below ``band`` for ``run`` consecutive lags."""
    below = np.asarray(r) < band
    for k in range(1, below.size - run + 1):
        if below[k:k + run].all():
            return k
    return None


def correlation_length(trace, max_lag: int | None = None, run: int = 5):
    """Return ``(tau, crossing)``.

    ``tau = -1 / ln r(1)`` assumes exponential decay of the acf; it is 0 when
    ``r(1) <= 0``.  ``crossing`` is the band-crossing lag of
    :func:`band_crossing`, or ``None`` if the acf never settles below the band
    within ``max_lag`` (default ``L // 4``).
    """
    y = _values(trace)
    if max_lag is None:
        max_lag = max(1, y.size // 4)
    c = acf(y, max_lag)
    r1 = c.values[1]
    if r1 <= 0:
        tau = 0.0
    elif r1 >= 1:
        tau = math.inf
    else:
        tau = -1.0 / math.log(r1)
    return tau, band_crossing(c.values, c.band, run)


# -- ARMA ---------------------------------------------------------------------

@dataclass(frozen=True)
class ArmaModel:
    """Conditional least-squares ARMA(p, q) fit.

    ``y_t = c + sum a_i y_{t-i} + e_t + sum b_j e_{t-j}``; ``stderr`` and
    ``tstat`` are ordered ``(c, a_1..a_p, b_1..b_q)``.
    """
    p: int
    q: int
    c: float
    ar: np.ndarray
    ma: np.ndarray
    stderr: np.ndarray
    tstat: np.ndarray
    residuals: np.ndarray
    sigma2: float
    aic: float
    r2: float
    n_obs: int
    iterations: int

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([[self.c], self.ar, self.ma])

    def significant(self, threshold: float = 2.0) -> np.ndarray:
        return self.tstat >= threshold

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "c": self.c, "ar": self.ar.tolist(),
                "ma": self.ma.tolist(), "stderr": self.stderr.tolist(),
                "tstat": self.tstat.tolist(), "sigma2": self.sigma2, "aic": self.aic,
                "r2": self.r2, "n_obs": self.n_obs, "iterations": self.iterations}


def aic(sigma2: float, p: int, q: int, L: int) -> float:
    """``log(sigma2) + 2 (p + q) / L``."""
    return math.log(sigma2) + 2.0 * (p + q) / L


def _lagged(y: np.ndarray, p: int, m: int) -> np.ndarray:
    """Columns ``y_{t-1}..y_{t-p}`` for ``t = m..L-1``."""
    L = y.size
    return np.column_stack([y[m - i:L - i] for i in range(1, p + 1)]) if p else np.empty((L - m, 0))


def _css(y, theta, p, q, m, jac=False):
    """Residuals (and their Jacobian) of the conditional ARMA recursion."""
    c, a, b = theta[0], theta[1:1 + p], theta[1 + p:]
    X = _lagged(y, p, m)
    w = y[m:] - c - X @ a
    den = np.concatenate([[1.0], b])
    e = signal.lfilter([1.0], den, w)
    if not jac:
        return e, None
    n = e.size
    J = np.empty((n, 1 + p + q))
    J[:, 0] = signal.lfilter([1.0], den, -np.ones(n))
    for i in range(p):
        J[:, 1 + i] = signal.lfilter([1.0], den, -X[:, i])
    for j in range(1, q + 1):
        lag = np.zeros(n)
        lag[j:] = e[:n - j]
        J[:, p + j] = signal.lfilter([1.0], den, -lag)
    return e, J


def _hannan_rissanen(y, p, q, m):
    L = y.size
    if q == 0:
        X = np.column_stack([np.ones(L - m), _lagged(y, p, m)])
        return np.linalg.lstsq(X, y[m:], rcond=None)[0]
    k = min(max(p + q + 1, int(math.ceil(10 * math.log10(L)))), L // 4)
    Xk = np.column_stack([np.ones(L - k), _lagged(y, k, k)])
    coef = np.linalg.lstsq(Xk, y[k:], rcond=None)[0]
    ehat = np.zeros(L)
    ehat[k:] = y[k:] - Xk @ coef
    s = k + q
    X = np.column_stack([np.ones(L - s), _lagged(y, p, s), _lagged(ehat, q, s)])
    return np.linalg.lstsq(X, y[s:], rcond=None)[0]


def _root_warnings(ar, ma):
    if ar.size and np.any(np.abs(np.roots(np.r_[-ar[::-1], 1.0])) <= 1.0):
        warnings.warn("AR polynomial has a root on or inside the unit circle", NonStationary)
    if ma.size and np.any(np.abs(np.roots(np.r_[ma[::-1], 1.0])) <= 1.0):
        warnings.warn("MA polynomial has a root on or inside the unit circle", NonInvertible)


def fit_arma(trace, p: int, q: int, max_iter: int = 200, tol: float = 1e-10) -> ArmaModel:
    """Fit ARMA(p, q) by conditional sum of squares.

    Starting values come from a two-stage Hannan-Rissanen regression; the
    sum of squares is then minimised by damped Gauss-Newton until its
    relative change drops below ``tol``.  The first ``max(p, q)`` points
    only serve as initial conditions (pre-sample innovations are zero).

    Raises
    ------
    DomainError
        If the series is too short (``L <= 10 (p + q + 1)``).
    NonConvergence
        If ``max_iter`` iterations are exhausted.
    """
    y = _values(trace)
    L = y.size
    if p < 0 or q < 0:
        raise DomainError("orders must be non-negative")
    if L <= 10 * (p + q + 1):
        raise DomainError(f"series of length {L} too short for ARMA({p},{q})")
    m = max(p, q)
    theta = _hannan_rissanen(y, p, q, m)
    e, J = _css(y, theta, p, q, m, jac=True)
    sse = float(e @ e)
    it = 0
    converged = q == 0
    while not converged:
        if it >= max_iter:
            raise NonConvergence(f"ARMA({p},{q}) did not converge in {max_iter} iterations")
        it += 1
        delta = np.linalg.lstsq(J, -e, rcond=None)[0]
        lam = 1.0
        while True:
            cand = theta + lam * delta
            with np.errstate(over="ignore", invalid="ignore"):
                e_new, _ = _css(y, cand, p, q, m)
                sse_new = float(e_new @ e_new)
            if np.isfinite(sse_new) and sse_new <= sse:
                break
            lam *= 0.5
            if lam < 1e-10:
                cand, sse_new = theta, sse
                break
        change = abs(sse - sse_new) / max(sse, 1e-300)
        theta = cand
        sse = sse_new
        e, J = _css(y, theta, p, q, m, jac=True)
        if change < tol:
            converged = True

    n = e.size
    k = 1 + p + q
    sigma2 = sse / n
    s2_unbiased = sse / max(n - k, 1)
    try:
        cov = s2_unbiased * np.linalg.inv(J.T @ J)
        se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        se = np.full(k, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.abs(theta) / se
    fitted = y[m:] - e
    r2 = float(np.corrcoef(fitted, y[m:])[0, 1] ** 2) if np.std(fitted) > 0 else 0.0
    ar, ma = theta[1:1 + p].copy(), theta[1 + p:].copy()
    _root_warnings(ar, ma)
    return ArmaModel(p, q, float(theta[0]), ar, ma, se, t, e, sigma2,
                     aic(sigma2, p, q, L), r2, n, it)


def simulate_arma(c: float, ar, ma, length: int, seed, sigma: float = 1.0,
                  burn: int = 1000) -> np.ndarray:
    """Gaussian ARMA path; the first ``burn`` points are discarded."""
    ar = np.asarray(ar, float)
    ma = np.asarray(ma, float)
    eps = rng.generator(seed, "noise", 0).normal(0.0, sigma, length + burn)
    y = signal.lfilter(np.r_[1.0, ma], np.r_[1.0, -ar], eps)
    mean = c / (1.0 - ar.sum())
    return y[burn:] + mean


def ljung_box(residuals, h: int, n_params: int = 0):
    """Ljung-Box portmanteau test on the first ``h`` autocorrelations.

    ``n_params`` (``p + q`` of the fitted model, or the model itself) is
    subtracted from the degrees of freedom.  Returns ``(Q, p_value)``.
    """
    if isinstance(n_params, ArmaModel):
        n_params = n_params.p + n_params.q
    if h <= n_params:
        raise DomainError(f"h = {h} must exceed the {n_params} fitted parameters")
    e = np.asarray(residuals, float)
    L = e.size
    if h >= L:
        raise DomainError("h must be smaller than the series length")
    r = _acf_values(e, h)[1:]
    Q = L * (L + 2) * float(np.sum(r ** 2 / (L - np.arange(1, h + 1))))
    return Q, float(stats.chi2.sf(Q, h - n_params))


def ljung_box_table(residuals, h_max: int, n_params: int = 0):
    """``(h, Q, p)`` rows for every admissible ``h`` up to ``h_max``."""
    if isinstance(n_params, ArmaModel):
        n_params = n_params.p + n_params.q
    return [(h, *ljung_box(residuals, h, n_params)) for h in range(n_params + 1, h_max + 1)]


@dataclass(frozen=True)
class Candidate:
    p: int
    q: int
    aic: float
    model: ArmaModel


@dataclass(frozen=True)
class Identification:
    candidates: list
    pacf_cutoff: int
    acf_cutoff: int
    failed: list

    @property
    def orders(self) -> list[tuple[int, int]]:
        return [(c.p, c.q) for c in self.candidates]


def _cutoff(r: np.ndarray, band: float) -> int:
    """Last lag whose |value| exceeds the band, scanning until two quiet lags in a row."""
    last = 0
    quiet = 0
    for k in range(1, r.size):
        if abs(r[k]) > band:
            last = k
            quiet = 0
        else:
            quiet += 1
            if quiet >= 2:
                break
    return last


def box_jenkins_identify(trace, p_max: int = 3, q_max: int = 2, max_lag: int | None = None):
    """Fit every ARMA(p, q) up to the given orders and rank them by AIC.

    The pacf and acf cutoffs (last significant lag before two quiet lags) are
    reported as the classical hints for p and q.  Orders whose fit fails are
    listed in ``failed`` with the reason.
    """
    y = _values(trace)
    lag = _check_lag(y.size, max_lag)
    ac = acf(y, lag)
    pac = pacf(y, lag)
    cands, failed = [], []
    for p in range(p_max + 1):
        for q in range(q_max + 1):
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", NonStationary)
                    warnings.simplefilter("ignore", NonInvertible)
                    mdl = fit_arma(y, p, q)
            except (NonConvergence, DomainError, np.linalg.LinAlgError) as exc:
                failed.append((p, q, str(exc)))
                continue
            cands.append(Candidate(p, q, mdl.aic, mdl))
    cands.sort(key=lambda c: (c.aic, c.p + c.q))
    return Identification(cands, _cutoff(pac.values, pac.band), _cutoff(ac.values, ac.band), failed)
