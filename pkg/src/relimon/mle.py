"""Maximum-likelihood fit of the ordered Goel-Okumoto model.

For fixed b the likelihood is maximized in closed form by
a(b) = n**(1/r) / (1 - exp(-b s_n)), so estimation reduces to a root of the
profile score g(b) = d/db log L(a(b), b).  ``fit`` finds that root with a
bracketed Newton iteration; ``fit_oracle`` maximizes the profile likelihood
directly and exists to cross-check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .failure_data import GroupedSeries
from .go_model import OrderedGoModel, one_minus_exp

__all__ = [
    "FitError",
    "FitResult",
    "SolverConfig",
    "a_given_b",
    "fit",
    "fit_oracle",
    "log_likelihood",
    "log_likelihood_gradient",
    "profile_log_likelihood",
    "profile_score",
    "profile_score_derivative",
]

# r ln(a) above this switches the a^r F^r term to log space
_LOG_SPACE_THRESHOLD = 650.0
_MAX_LOG = math.log(np.finfo(float).max)


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    """Root-finding settings.

    Bracket bounds of None mean ``1e-6 / s_n`` and ``50 / s_n``.  Iteration
    stops when ``|step| <= tol_step * b`` or ``|g(b)| <= tol_score * n / b``.
    """

    bracket_lo: float | None = None
    bracket_hi: float | None = None
    scan_points: int = 256
    tol_step: float = 1e-12
    tol_score: float = 1e-9
    max_iter: int = 100

    def bracket(self, g: GroupedSeries) -> tuple[float, float]:
        lo = self.bracket_lo if self.bracket_lo is not None else 1e-6 / g.s_n
        hi = self.bracket_hi if self.bracket_hi is not None else 50.0 / g.s_n
        if not (0 < lo < hi and math.isfinite(hi)):
            raise ValueError(f"invalid bracket ({lo!r}, {hi!r})")
        return lo, hi


@dataclass(frozen=True)
class FitResult:
    model: OrderedGoModel
    n_groups: int
    iterations: int
    converged: bool
    residual: float
    log_lik: float
    bracket: tuple[float, float]
    n_roots: int = 1
    method: str = "newton"
    score_tol: float = field(default=math.nan, repr=False)

    @property
    def a(self) -> float:
        return self.model.a

    @property
    def b(self) -> float:
        return self.model.b

    def to_dict(self) -> dict:
        return {
            "a": self.model.a,
            "b": self.model.b,
            "r": self.model.order_r,
            "n": self.n_groups,
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "log_lik": self.log_lik,
            "bracket": list(self.bracket),
            "n_roots": self.n_roots,
            "method": self.method,
        }


def _check_positive(**kw):
    for name, value in kw.items():
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be finite and > 0, got {value!r}")


def _ordered_term(a: float, b: float, s_n: float, r: int) -> float:
    """[a(1 - exp(-b s_n))]**r, raising OverflowError instead of returning inf."""
    f_n = float(one_minus_exp(b * s_n))
    if r * math.log(a) <= _LOG_SPACE_THRESHOLD:
        value = (a * f_n) ** r
        if math.isfinite(value):
            return value
    log_value = r * (math.log(a) + math.log(f_n))
    if log_value > _MAX_LOG:
        raise OverflowError(f"[a(1-exp(-b s_n))]^r overflows (log = {log_value:.1f})")
    return math.exp(log_value)


def log_likelihood(g: GroupedSeries, a: float, b: float) -> float:
    _check_positive(a=a, b=b)
    r, n, s = g.order_r, g.n_groups, g.s
    terms = -b * s + (r - 1) * np.log(one_minus_exp(b * s))
    constant = n * (r * math.log(a) + math.log(b) + math.log(r))
    return math.fsum([-_ordered_term(a, b, g.s_n, r), constant, *terms])


def log_likelihood_gradient(g: GroupedSeries, a: float, b: float) -> tuple[float, float]:
    """Partial derivatives of ``log_likelihood`` with respect to a and b."""
    _check_positive(a=a, b=b)
    r, n, s, s_n = g.order_r, g.n_groups, g.s, g.s_n
    f_n = float(one_minus_exp(b * s_n))
    with np.errstate(over="ignore"):
        tail = s / np.expm1(b * s)
    d_a = n * r / a - r * a ** (r - 1) * f_n ** r
    d_b = (
        n / b
        - math.fsum(s)
        + (r - 1) * math.fsum(tail)
        - r * a ** r * f_n ** (r - 1) * s_n * math.exp(-b * s_n)
    )
    return d_a, d_b


def a_given_b(g: GroupedSeries, b: float) -> float:
    """Stationary point of log L in a for fixed b."""
    _check_positive(b=b)
    return g.n_groups ** (1.0 / g.order_r) / float(one_minus_exp(b * g.s_n))


def profile_log_likelihood(g: GroupedSeries, b: float) -> float:
    return log_likelihood(g, a_given_b(g, b), b)


def profile_score(g: GroupedSeries, b: float) -> float:
    """g(b) = n/b - sum s_k + (r-1) sum s_k/(e^{b s_k}-1) - n r s_n/(e^{b s_n}-1)."""
    _check_positive(b=b)
    r, n, s, s_n = g.order_r, g.n_groups, g.s, g.s_n
    with np.errstate(over="ignore"):
        tail = s / np.expm1(b * s)
    return math.fsum([
        n / b,
        -math.fsum(s),
        (r - 1) * math.fsum(tail),
        -n * r * s_n / np.expm1(b * s_n),
    ])


def _sq_ratio(s, b):
    # s^2 e^{-bs} / (1 - e^{-bs})^2, finite for large b*s
    return s * s * np.exp(-b * s) / one_minus_exp(b * s) ** 2


def profile_score_derivative(g: GroupedSeries, b: float) -> float:
    _check_positive(b=b)
    r, n, s, s_n = g.order_r, g.n_groups, g.s, g.s_n
    return math.fsum([
        -n / b**2,
        -(r - 1) * math.fsum(_sq_ratio(s, b)),
        n * r * float(_sq_ratio(s_n, b)),
    ])


def _newton_in_bracket(g: GroupedSeries, lo: float, hi: float, cfg: SolverConfig):
    """Newton from the midpoint of a sign-change interval, bisecting when a step leaves it."""
    n = g.n_groups
    g_lo = profile_score(g, lo)
    b = 0.5 * (lo + hi)
    for it in range(1, cfg.max_iter + 1):
        val = profile_score(g, b)
        if abs(val) <= cfg.tol_score * n / b:
            return b, it, True
        if (val > 0) == (g_lo > 0):
            lo, g_lo = b, val
        else:
            hi = b
        deriv = profile_score_derivative(g, b)
        b_new = b - val / deriv if deriv != 0 else math.nan
        if not (lo < b_new < hi):
            b_new = 0.5 * (lo + hi)
        step = abs(b_new - b)
        b = b_new
        if step <= cfg.tol_step * b:
            return b, it, True
    return b, cfg.max_iter, False


def _sign_changes(g: GroupedSeries, cfg: SolverConfig) -> list[tuple[float, float]]:
    lo, hi = cfg.bracket(g)
    grid = np.geomspace(lo, hi, cfg.scan_points)
    values = np.array([profile_score(g, b) for b in grid])
    intervals = []
    for i in range(len(grid) - 1):
        if values[i] == 0:
            intervals.append((grid[i], grid[i]))
        elif values[i] * values[i + 1] < 0:
            intervals.append((grid[i], grid[i + 1]))
    return intervals


def fit(g: GroupedSeries, cfg: SolverConfig = SolverConfig()) -> FitResult:
    """Estimate (a, b) by solving the profile score equation.

    Every sign change of g on a log-spaced scan of the bracket is refined;
    among several roots the one with the largest log-likelihood wins.  A fit
    that exhausts ``max_iter`` is returned with ``converged=False``.
    """
    if g.n_groups < 2:
        raise FitError(f"need at least 2 groups, got {g.n_groups}")
    bracket = cfg.bracket(g)
    intervals = _sign_changes(g, cfg)
    if not intervals:
        raise FitError(
            f"profile score has no sign change in b in [{bracket[0]:.6g}, {bracket[1]:.6g}]; "
            "model may not fit this data"
        )
    candidates = []
    for lo, hi in intervals:
        if lo == hi:
            b, its, ok = lo, 0, True
        else:
            b, its, ok = _newton_in_bracket(g, lo, hi, cfg)
        candidates.append((profile_log_likelihood(g, b), b, its, ok))
    log_lik, b, its, ok = max(candidates, key=lambda c: c[0])
    residual = abs(profile_score(g, b))
    return FitResult(
        model=OrderedGoModel.from_ab(a_given_b(g, b), b, g.order_r),
        n_groups=g.n_groups,
        iterations=its,
        converged=ok,
        residual=residual,
        log_lik=log_lik,
        bracket=bracket,
        n_roots=len(candidates),
        method="newton",
        score_tol=cfg.tol_score * g.n_groups / b,
    )


def fit_oracle(g: GroupedSeries, cfg: SolverConfig = SolverConfig(), grid_points: int = 4001) -> FitResult:
    """Maximize the profile log-likelihood by grid scan plus golden-section search.

    Uses only ``log_likelihood`` and ``a_given_b``; no score or derivative.
    """
    if g.n_groups < 2:
        raise FitError(f"need at least 2 groups, got {g.n_groups}")
    if grid_points < 2000:
        raise ValueError("oracle grid needs at least 2000 points")
    lo, hi = cfg.bracket(g)
    log_grid = np.linspace(math.log(lo), math.log(hi), grid_points)
    values = np.array([profile_log_likelihood(g, math.exp(x)) for x in log_grid])
    i = int(np.argmax(values))
    if i == 0 or i == grid_points - 1:
        raise FitError("profile likelihood maximum lies on the bracket edge; model may not fit this data")

    res = minimize_scalar(
        lambda x: -profile_log_likelihood(g, math.exp(x)),
        bracket=(log_grid[i - 1], log_grid[i], log_grid[i + 1]),
        method="golden",
        tol=1e-12,
    )
    b = math.exp(res.x)
    return FitResult(
        model=OrderedGoModel.from_ab(a_given_b(g, b), b, g.order_r),
        n_groups=g.n_groups,
        iterations=int(res.nit),
        converged=bool(res.success),
        residual=abs(profile_score(g, b)),
        log_lik=profile_log_likelihood(g, b),
        bracket=(lo, hi),
        n_roots=1,
        method="grid+golden",
    )


def with_overrides(cfg: SolverConfig, **kw) -> SolverConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
