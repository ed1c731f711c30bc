"""Piecewise-linear log-caseload regression with a latent change point.

An intervention bends the exponential phase of an epidemic: on a log scale
the cumulative caseload follows one line of slope w1 before the change
point tau and another of slope w2 after it.  Fitting both slopes yields the
intervention's transmission-reduction efficiency 1 - w2/w1.

The observation noise is StudentT with 2 degrees of freedom, which shrugs
off the reporting artifacts (batch corrections, definition changes) that
dot national case series.  Slopes are stored in log-cases per unit of
normalized time; their priors are specified in per-day units (the natural
scale of published growth rates) and rescaled by the series span when the
posterior is evaluated.

tau has no useful gradient (the likelihood is piecewise constant in it
between data points), so it is sampled by random-walk Metropolis within a
Gibbs sweep while the smooth block uses HMC.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

from .data_io import RegressionSeries
from .errors import DegenerateSeries, NotConverged, ZeroBaseline, ZeroSlope
from .mcmc import (
    Affine,
    Chain,
    Exp,
    GibbsBlock,
    Interval,
    McmcConfig,
    ProbModel,
    VectorTransform,
    diagnostics,
    sample_gibbs_hybrid,
)

PARAM_NAMES = ("w1", "w2", "b1", "b2", "tau", "noise_scale")
RHAT_THRESHOLD = 1.05
INTERVAL_MASS = 0.94

# StudentT(df=2) log-density constant: ln Gamma(1.5) - 0.5 ln(2 pi)
_T2_CONST = float(gammaln(1.5) - 0.5 * math.log(2.0 * math.pi))


class NegativeLagWarning(UserWarning):
    """Change point precedes the policy start date."""


@dataclass(frozen=True)
class ChangePointParams:
    """Model parameters; slopes in log-cases per unit normalized time."""

    w1: float
    w2: float
    b1: float
    b2: float
    tau: float
    noise_scale: float

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")
        if self.noise_scale <= 0.0:
            raise ValueError("noise_scale must be positive")


@dataclass(frozen=True)
class ChangePointPriors:
    """Hyperparameters; slope priors are in per-day units."""

    w1_mean: float = 0.5
    w1_sd: float = 0.25
    w2_mean: float = 0.0
    w2_sd: float = 0.25
    b1_mean: float = 0.0
    b1_sd: float = 1.0
    b2_mean: float = 0.0
    b2_sd: float = 0.1
    tau_a: float = 4.0
    tau_b: float = 3.0
    noise_sd: float = 0.1
    s2_floored: bool = False


def build_priors(series: RegressionSeries) -> ChangePointPriors:
    """Adapt the intercept priors to the series' caseload magnitudes.

    b1 centers on the mean of y over the first time quartile (t <= 0.25),
    b2 on the mean over the fourth (t >= 0.75) with sd 0.25 * m2.  A
    negative or tiny m2 would produce a degenerate sd, so |0.25 * m2| is
    floored at 0.1 and flagged.
    """
    q1 = series.y[series.t <= 0.25]
    q4 = series.y[series.t >= 0.75]
    if len(q1) == 0 or len(q4) == 0:
        raise DegenerateSeries("an outer time quartile holds no points")
    m1 = float(q1.mean())
    m2 = float(q4.mean())
    s2 = abs(0.25 * m2)
    floored = s2 < 0.1
    return ChangePointPriors(
        b1_mean=m1, b1_sd=1.0,
        b2_mean=m2, b2_sd=max(s2, 0.1), s2_floored=floored,
    )


def studentt2_logpdf(x, loc, scale):
    """StudentT(df=2, loc, scale) log-density (elementwise)."""
    with np.errstate(over="ignore"):
        r = (np.asarray(x) - loc) / scale
        return _T2_CONST - np.log(scale) - 1.5 * np.log1p(r * r / 2.0)


def _normal_logpdf(x, mean, sd):
    z = (x - mean) / sd
    return -0.5 * math.log(2.0 * math.pi) - math.log(sd) - 0.5 * z * z


def _log_posterior_parts(w1, w2, b1, b2, tau, sigma, t, y, span_days,
                         priors: ChangePointPriors) -> float:
    if not 0.0 < tau < 1.0 or sigma <= 0.0:
        return -math.inf
    first = t < tau
    loc = np.where(first, w1 * t + b1, w2 * t + b2)
    loglik = float(studentt2_logpdf(y, loc, sigma).sum())

    # slope priors live on the per-day scale; constant Jacobian ln(1/span)
    # from the unit change keeps this a proper density over normalized slopes
    log_prior = (
        _normal_logpdf(w1 / span_days, priors.w1_mean, priors.w1_sd)
        + _normal_logpdf(w2 / span_days, priors.w2_mean, priors.w2_sd)
        - 2.0 * math.log(span_days)
        + _normal_logpdf(b1, priors.b1_mean, priors.b1_sd)
        + _normal_logpdf(b2, priors.b2_mean, priors.b2_sd)
        + (priors.tau_a - 1.0) * math.log(tau)
        + (priors.tau_b - 1.0) * math.log1p(-tau)
        - float(betaln(priors.tau_a, priors.tau_b))
        + 0.5 * math.log(2.0 / math.pi) - math.log(priors.noise_sd)
        - sigma * sigma / (2.0 * priors.noise_sd ** 2)
    )
    return loglik + log_prior


def _grad_log_posterior(w1, w2, b1, b2, tau, sigma, t, y, span_days,
                        priors: ChangePointPriors) -> np.ndarray:
    if sigma <= 1e-100 or not math.isfinite(sigma) or not 0.0 < tau < 1.0:
        return np.zeros(6)  # off support; the proposal is rejected anyway
    with np.errstate(over="ignore", invalid="ignore"):
        first = t < tau
        loc = np.where(first, w1 * t + b1, w2 * t + b2)
        r = y - loc
        denom = 2.0 * sigma * sigma + r * r
        dloc = np.nan_to_num(3.0 * r / denom)
        dsigma_lik = float(np.nan_to_num(
            -1.0 / sigma + 3.0 * r * r / (sigma * denom)).sum())

    g = np.zeros(6)
    g[0] = float((dloc * t)[first].sum()) \
        - (w1 / span_days - priors.w1_mean) / (priors.w1_sd ** 2) / span_days
    g[1] = float((dloc * t)[~first].sum()) \
        - (w2 / span_days - priors.w2_mean) / (priors.w2_sd ** 2) / span_days
    g[2] = float(dloc[first].sum()) - (b1 - priors.b1_mean) / priors.b1_sd ** 2
    g[3] = float(dloc[~first].sum()) - (b2 - priors.b2_mean) / priors.b2_sd ** 2
    # likelihood is flat in tau between data points; only the Beta prior moves
    g[4] = (priors.tau_a - 1.0) / tau - (priors.tau_b - 1.0) / (1.0 - tau)
    g[5] = dsigma_lik - sigma / priors.noise_sd ** 2
    return g


def log_posterior(params: ChangePointParams, series: RegressionSeries,
                  priors: ChangePointPriors) -> float:
    """Joint log density of data and parameters (-inf off support)."""
    return _log_posterior_parts(
        params.w1, params.w2, params.b1, params.b2, params.tau,
        params.noise_scale, series.t, series.y, series.span_days, priors)


def efficiency(w1: float, w2: float) -> float:
    """Transmission reduction 1 - w2/w1 attributed to the intervention."""
    if w1 == 0.0:
        raise ZeroSlope("pre-change slope is zero")
    return 1.0 - w2 / w1


def efficiency_from_re(re_after: float, r0_baseline: float) -> float:
    """Efficiency via the reproduction-number ratio 1 - Re_after / R0."""
    if r0_baseline <= 0.0:
        raise ZeroBaseline("baseline reproduction number must be positive")
    return 1.0 - re_after / r0_baseline


@dataclass
class ParamSummary:
    mean: float
    lo: float
    hi: float


@dataclass
class ChangePointPosterior:
    chains: list[Chain]
    summaries: dict[str, ParamSummary]
    change_date: dt.date
    efficiency: ParamSummary
    rhat: dict[str, float]
    ess: dict[str, float]
    series: RegressionSeries
    priors: ChangePointPriors

    def draws(self) -> np.ndarray:
        return np.concatenate([c.draws for c in self.chains])

    def per_day_slopes(self) -> tuple[float, float]:
        span = self.series.span_days
        return (self.summaries["w1"].mean / span, self.summaries["w2"].mean / span)


def _summary(values: np.ndarray) -> ParamSummary:
    tail = (1.0 - INTERVAL_MASS) / 2.0
    lo, hi = np.quantile(values, [tail, 1.0 - tail])
    return ParamSummary(mean=float(values.mean()), lo=float(lo), hi=float(hi))


# Sampling uses line values at the outer-quartile midpoints instead of the
# t=0 / t=1-side intercepts: l1 = w1*C1 + b1, l2 = w2*C2 + b2.  This is a
# unit-Jacobian reparameterization (the priors still apply to b1, b2) that
# removes most of the slope-intercept posterior correlation, which a
# unit-mass-matrix HMC mixes through poorly.
SEGMENT_CENTERS = (0.125, 0.875)


def changepoint_model(series: RegressionSeries,
                      priors: ChangePointPriors) -> ProbModel:
    """ProbModel over (w1, w2, l1, l2, tau, noise_scale), prior-whitened."""
    t = series.t
    y = series.y
    span = float(series.span_days)
    c1, c2 = SEGMENT_CENTERS
    transform = VectorTransform([
        Affine(priors.w1_mean * span, priors.w1_sd * span),
        Affine(priors.w2_mean * span, priors.w2_sd * span),
        Affine(priors.b1_mean + priors.w1_mean * span * c1, priors.b1_sd),
        Affine(priors.b2_mean + priors.w2_mean * span * c2, priors.b2_sd),
        Interval(0.0, 1.0),
        Exp(scale=priors.noise_sd),
    ])

    def log_density(x: np.ndarray) -> float:
        b1 = x[2] - x[0] * c1
        b2 = x[3] - x[1] * c2
        return _log_posterior_parts(x[0], x[1], b1, b2, x[4], x[5],
                                    t, y, span, priors)

    def grad(x: np.ndarray) -> np.ndarray:
        b1 = x[2] - x[0] * c1
        b2 = x[3] - x[1] * c2
        g = _grad_log_posterior(x[0], x[1], b1, b2, x[4], x[5],
                                t, y, span, priors)
        return np.array([
            g[0] - c1 * g[2], g[1] - c2 * g[3], g[2], g[3], g[4], g[5],
        ])

    # start chains at rough head/tail least-squares lines so the sampler
    # opens inside the two-segment basin rather than at the blind prior mean
    head = t < 0.5
    tail = t >= 0.75
    w1_init, l1_init = _segment_line(t[head], y[head], c1)
    w2_init, l2_init = _segment_line(t[tail], y[tail], c2)
    init = np.array([w1_init, w2_init, l1_init, l2_init, 0.5, 0.05])
    return ProbModel(dim=6, log_density=log_density, transform=transform,
                     grad_log_density=grad, init=init)


def _segment_line(t: np.ndarray, y: np.ndarray, center: float
                  ) -> tuple[float, float]:
    """Least-squares slope and line value at `center` for one segment."""
    if len(t) < 2:
        return 0.0, float(y.mean()) if len(t) else 0.0
    tm, ym = t.mean(), y.mean()
    var = float(((t - tm) ** 2).sum())
    slope = float(((t - tm) * (y - ym)).sum() / var) if var > 0 else 0.0
    return slope, float(ym + slope * (center - tm))


def _uncenter_draws(draws: np.ndarray) -> np.ndarray:
    """Map sampling-space draws (l1, l2) back to intercepts (b1, b2)."""
    c1, c2 = SEGMENT_CENTERS
    out = draws.copy()
    out[:, 2] = draws[:, 2] - draws[:, 0] * c1
    out[:, 3] = draws[:, 3] - draws[:, 1] * c2
    return out


GIBBS_BLOCKS = (
    GibbsBlock(indices=(0, 1, 2, 3, 5), kernel="hmc", leapfrog_steps=64,
               target_accept=0.85),
    GibbsBlock(indices=(4,), kernel="rwmh", proposal_scale=0.4),
)


def default_cfg(seed: int = 0, num_warmup: int = 1000, num_samples: int = 1000,
                num_chains: int = 4) -> McmcConfig:
    """Sampler configuration used by both the CLI and the HTTP service."""
    return McmcConfig(num_warmup=num_warmup, num_samples=num_samples,
                      num_chains=num_chains, seed=seed,
                      init_step_size=0.02, init_jitter=0.05)


def fit_changepoint(series: RegressionSeries,
                    cfg: McmcConfig | None = None) -> ChangePointPosterior:
    """Sample the posterior and summarize; fails loudly when unconverged."""
    if len(series.t) < 20:
        raise DegenerateSeries(f"need >= 20 points, got {len(series.t)}")
    cfg = cfg or default_cfg()
    priors = build_priors(series)
    model = changepoint_model(series, priors)
    chains = [
        Chain(draws=_uncenter_draws(c.draws), accept_rate=c.accept_rate,
              divergences=c.divergences)
        for c in sample_gibbs_hybrid(model, cfg, GIBBS_BLOCKS)
    ]
    diags = diagnostics(chains)
    rhat = dict(zip(PARAM_NAMES, diags["rhat"]))
    ess = dict(zip(PARAM_NAMES, diags["ess"]))
    if max(rhat.values()) >= RHAT_THRESHOLD:
        raise NotConverged(rhat, RHAT_THRESHOLD)

    draws = np.concatenate([c.draws for c in chains])
    summaries = {
        name: _summary(draws[:, k]) for k, name in enumerate(PARAM_NAMES)
    }
    w1 = draws[:, 0]
    w2 = draws[:, 1]
    ok = w1 != 0.0
    eff = _summary(1.0 - w2[ok] / w1[ok])
    change_date = series.date_of(summaries["tau"].mean)
    return ChangePointPosterior(
        chains=chains, summaries=summaries, change_date=change_date,
        efficiency=eff, rhat=rhat, ess=ess, series=series, priors=priors)


def take_effect_days(posterior: ChangePointPosterior,
                     policy_start: dt.date) -> int:
    """Whole days from policy start to the posterior change date."""
    lag = (posterior.change_date - policy_start).days
    if lag < 0:
        warnings.warn(
            f"change point {posterior.change_date} precedes policy start "
            f"{policy_start}", NegativeLagWarning)
    return lag


def fit_report(posterior: ChangePointPosterior, country: str = "",
               policy_start: dt.date | None = None) -> dict:
    """JSON-ready fit report."""
    span = posterior.series.span_days
    s = posterior.summaries
    report = {
        "country": country,
        "date_range": [d.isoformat() for d in posterior.series.date_range],
        "policy_start": policy_start.isoformat() if policy_start else None,
        "w1": s["w1"].mean,
        "w2": s["w2"].mean,
        "w1_per_day": s["w1"].mean / span,
        "w2_per_day": s["w2"].mean / span,
        "tau": s["tau"].mean,
        "noise_scale": s["noise_scale"].mean,
        "change_date": posterior.change_date.isoformat(),
        "efficiency": posterior.efficiency.mean,
        "efficiency_interval": [posterior.efficiency.lo, posterior.efficiency.hi],
        "take_effect_days": (
            take_effect_days(posterior, policy_start) if policy_start else None
        ),
        "rhat": {k: float(v) for k, v in posterior.rhat.items()},
        "ess": {k: float(v) for k, v in posterior.ess.items()},
    }
    return report


def draws_csv(posterior: ChangePointPosterior) -> str:
    """Posterior draws, one column per constrained parameter."""
    from .mcmc import chains_to_csv

    return chains_to_csv(posterior.chains, PARAM_NAMES)


def plot_data_csv(posterior: ChangePointPosterior) -> str:
    """(t, y, posterior-mean fit line) rows for external charting."""
    s = posterior.summaries
    t = posterior.series.t
    y = posterior.series.y
    tau = s["tau"].mean
    fit = np.where(t < tau, s["w1"].mean * t + s["b1"].mean,
                   s["w2"].mean * t + s["b2"].mean)
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "y", "fit"])
    for row in zip(t, y, fit):
        w.writerow([f"{v:.10g}" for v in row])
    return out.getvalue()
