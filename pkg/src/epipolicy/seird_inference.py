"""Virus-parameter inference from an early, intervention-free case series.

Fits the deterministic SEIRD dynamics (constant Re = R0) to daily new
confirmed cases and deaths.  New confirmed cases are matched to the E->I
flow (detection at symptom onset), deaths to the I->D flow.  Observation
noise is negative binomial around the deterministic flow means with a
heavy quadratic overdispersion (variance m + dispersion * m^2, dispersion
10 by default): national early-phase counts are dominated by testing and
reporting artifacts, so the likelihood is deliberately weakly informative
and the posterior stays anchored to the epidemiological priors.

Initial exposed/infectious occupancies are inferred alongside the virus
parameters; nothing in the data pins them a priori.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln, gammaln

from .data_io import TimeSeries
from .errors import NotConverged, TooFewPoints
from .mcmc import (
    Chain,
    Exp,
    Interval,
    McmcConfig,
    ProbModel,
    VectorTransform,
    diagnostics,
    sample_hmc,
)

PARAM_NAMES = ("r0", "recovery_time", "incubation_time", "mu", "e0", "i0")
RHAT_THRESHOLD = 1.05
INTERVAL_MASS = 0.94
# Quadratic-overdispersion coefficient of the observation model.  Calibrated
# so that fits to real national series stay prior-anchored: early-phase
# confirmed counts are testing-capacity artifacts more than epidemiology,
# and a tighter likelihood chases them into implausible parameter corners.
DEFAULT_DISPERSION = 40.0


def _beta_shapes(mean: float, sd: float) -> tuple[float, float]:
    common = mean * (1.0 - mean) / (sd * sd) - 1.0
    return mean * common, (1.0 - mean) * common


@dataclass(frozen=True)
class SeirdPriors:
    r0_log_mean: float = math.log(2.0)
    r0_log_sd: float = 0.5
    recovery_mean: float = 14.0
    recovery_sd: float = 3.0
    recovery_lo: float = 2.0
    incubation_mean: float = 5.5
    incubation_sd: float = 1.5
    incubation_lo: float = 1.0
    mu_mean: float = 0.025
    mu_sd: float = 0.01
    seed_log_mean: float = math.log(10.0)
    seed_log_sd: float = 1.0

    def mu_beta(self) -> tuple[float, float]:
        return _beta_shapes(self.mu_mean, self.mu_sd)


def _lognormal_logpdf(x, log_mean, log_sd):
    lx = math.log(x)
    z = (lx - log_mean) / log_sd
    return -lx - math.log(log_sd) - 0.5 * math.log(2 * math.pi) - 0.5 * z * z


def _normal_logpdf(x, mean, sd):
    z = (x - mean) / sd
    return -math.log(sd) - 0.5 * math.log(2 * math.pi) - 0.5 * z * z


# Baseline observation mean (cases/day) added to every flow: keeps the
# log-score bounded when the deterministic mean approaches zero (otherwise
# zero-count days reward vanishing trajectories without limit).
MEAN_FLOOR = 0.5


def neg_binomial_logpmf(x: np.ndarray, mean: np.ndarray, dispersion: float
                        ) -> np.ndarray:
    """NB log-pmf with mean m and variance m + dispersion * m^2."""
    k = 1.0 / dispersion
    m = np.asarray(mean) + MEAN_FLOOR
    return (gammaln(x + k) - gammaln(k) - gammaln(x + 1.0)
            + k * np.log(k / (k + m)) + x * np.log(m / (k + m)))


def simulate_flows(r0: float, recovery_time: float, incubation_time: float,
                   mu: float, e0: float, i0: float, n: float, horizon: int,
                   substeps: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Daily (new infectious, new deaths) flow means of the deterministic model.

    Same forward-Euler scheme and internal step refinement as the scenario
    simulator; flows are summed to the daily grid.
    """
    gamma = 1.0 / recovery_time
    sigma = 1.0 / incubation_time
    s = n - e0 - i0
    if s <= 0:
        raise ValueError("initial seeds exceed the population")
    e, i = e0, i0
    conf = np.empty(horizon)
    dead = np.empty(horizon)
    beta = r0 * gamma
    dt = 1.0 / substeps
    for day in range(horizon):
        ni_day = nd_day = 0.0
        for _ in range(substeps):
            new_e = min(beta * s * i / n * dt, s)
            new_i = min(sigma * e * dt, e)
            out_i = min(gamma * i * dt, i)
            s -= new_e
            e += new_e - new_i
            i += new_i - out_i
            ni_day += new_i
            nd_day += mu * out_i
        conf[day] = ni_day
        dead[day] = nd_day
    return conf, dead


def seird_log_posterior(theta, observed_confirmed, observed_deaths,
                        priors: SeirdPriors, n: float,
                        dispersion: float = DEFAULT_DISPERSION,
                        substeps: int = 2) -> float:
    """Joint log density; theta = (r0, recovery, incubation, mu, e0, i0)."""
    r0, rec, inc, mu, e0, i0 = [float(v) for v in theta]
    if (r0 <= 0 or rec <= priors.recovery_lo or inc <= priors.incubation_lo
            or not 0 < mu < 1 or e0 <= 0 or i0 <= 0 or e0 + i0 >= n):
        return -math.inf
    observed_confirmed = np.asarray(observed_confirmed, dtype=float)
    horizon = len(observed_confirmed)
    conf_mean, dead_mean = simulate_flows(r0, rec, inc, mu, e0, i0, n, horizon,
                                          substeps=substeps)
    lp = float(neg_binomial_logpmf(observed_confirmed, conf_mean, dispersion).sum())
    if observed_deaths is not None:
        observed_deaths = np.asarray(observed_deaths, dtype=float)
        lp += float(neg_binomial_logpmf(observed_deaths, dead_mean, dispersion).sum())

    a, b = priors.mu_beta()
    lp += (
        _lognormal_logpdf(r0, priors.r0_log_mean, priors.r0_log_sd)
        + _normal_logpdf(rec, priors.recovery_mean, priors.recovery_sd)
        + _normal_logpdf(inc, priors.incubation_mean, priors.incubation_sd)
        + (a - 1.0) * math.log(mu) + (b - 1.0) * math.log1p(-mu)
        - float(betaln(a, b))
        + _lognormal_logpdf(e0, priors.seed_log_mean, priors.seed_log_sd)
        + _lognormal_logpdf(i0, priors.seed_log_mean, priors.seed_log_sd)
    )
    return lp


def daily_increments(series: TimeSeries) -> np.ndarray:
    """New counts from a cumulative series; negative increments clamp to 0."""
    values = np.asarray(series.values, dtype=float)
    return np.maximum(np.diff(values), 0.0)


@dataclass
class ParamSummary:
    mean: float
    lo: float
    hi: float


@dataclass
class SeirdPosterior:
    chains: list[Chain]
    summaries: dict[str, ParamSummary]
    rhat: dict[str, float]
    ess: dict[str, float]
    priors: SeirdPriors

    def draws(self) -> np.ndarray:
        return np.concatenate([c.draws for c in self.chains])


def _summary(values: np.ndarray) -> ParamSummary:
    tail = (1.0 - INTERVAL_MASS) / 2.0
    lo, hi = np.quantile(values, [tail, 1.0 - tail])
    return ParamSummary(mean=float(values.mean()), lo=float(lo), hi=float(hi))


def seird_model(observed_confirmed, observed_deaths, priors: SeirdPriors,
                n: float, dispersion: float = DEFAULT_DISPERSION,
                substeps: int = 2) -> ProbModel:
    transform = VectorTransform([
        Exp(),                         # r0
        Exp(lo=priors.recovery_lo),    # recovery time
        Exp(lo=priors.incubation_lo),  # incubation time
        Interval(0.0, 1.0),            # mu
        Exp(),                         # e0
        Exp(),                         # i0
    ])

    def log_density(x: np.ndarray) -> float:
        return seird_log_posterior(x, observed_confirmed, observed_deaths,
                                   priors, n, dispersion, substeps)

    init = np.array([
        math.exp(priors.r0_log_mean), priors.recovery_mean,
        priors.incubation_mean, priors.mu_mean,
        math.exp(priors.seed_log_mean), math.exp(priors.seed_log_mean),
    ])
    return ProbModel(dim=6, log_density=log_density, transform=transform,
                     grad_log_density=None, init=init)


def fit_seird(series_confirmed: TimeSeries,
              series_deaths: TimeSeries | None,
              n: float,
              cfg: McmcConfig | None = None,
              priors: SeirdPriors | None = None,
              dispersion: float = DEFAULT_DISPERSION,
              substeps: int = 2) -> SeirdPosterior:
    """HMC fit of the virus parameters to one national window."""
    if len(series_confirmed.dates) < 21:
        raise TooFewPoints("need at least 21 days of data")
    if series_deaths is not None and series_deaths.dates != series_confirmed.dates:
        raise ValueError("confirmed and deaths series must share their dates")
    cfg = cfg or McmcConfig(num_warmup=500, num_samples=500, num_chains=4,
                            seed=0, leapfrog_steps=12, init_step_size=0.05)
    priors = priors or SeirdPriors()
    conf = daily_increments(series_confirmed)
    dead = daily_increments(series_deaths) if series_deaths is not None else None
    model = seird_model(conf, dead, priors, n, dispersion, substeps)
    chains = sample_hmc(model, cfg)
    diags = diagnostics(chains)
    rhat = dict(zip(PARAM_NAMES, diags["rhat"]))
    ess = dict(zip(PARAM_NAMES, diags["ess"]))
    if max(rhat.values()) >= RHAT_THRESHOLD:
        raise NotConverged(rhat, RHAT_THRESHOLD)
    draws = np.concatenate([c.draws for c in chains])
    summaries = {
        name: _summary(draws[:, k]) for k, name in enumerate(PARAM_NAMES)
    }
    return SeirdPosterior(chains=chains, summaries=summaries, rhat=rhat,
                          ess=ess, priors=priors)


def fit_report(posterior: SeirdPosterior) -> dict:
    """JSON report of the headline virus statistics."""
    s = posterior.summaries

    def entry(name):
        return {"mean": s[name].mean, "lo": s[name].lo, "hi": s[name].hi}

    return {
        "recovery_time_days": entry("recovery_time"),
        "incubation_time_days": entry("incubation_time"),
        "r0": entry("r0"),
        "case_fatality": entry("mu"),
        "seed_exposed": entry("e0"),
        "seed_infectious": entry("i0"),
        "rhat": {k: float(v) for k, v in posterior.rhat.items()},
        "ess": {k: float(v) for k, v in posterior.ess.items()},
    }


def average_reports(reports: list[dict]) -> dict:
    """Average the headline means across repeated runs (distinct seeds)."""
    keys = ("recovery_time_days", "incubation_time_days", "r0", "case_fatality")
    out = {"runs": len(reports)}
    for key in keys:
        out[key] = {
            "mean": float(np.mean([r[key]["mean"] for r in reports])),
            "lo": float(np.mean([r[key]["lo"] for r in reports])),
            "hi": float(np.mean([r[key]["hi"] for r in reports])),
        }
    return out
