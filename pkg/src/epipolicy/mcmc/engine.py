"""Markov chain Monte Carlo kernels over transformed targets.

Three samplers share one target abstraction:

  * random-walk Metropolis (`sample_rwmh`)
  * Hamiltonian Monte Carlo with leapfrog integration and dual-averaging
    step-size adaptation toward a target acceptance rate (`sample_hmc`)
  * Metropolis-within-Gibbs composition of the two (`sample_gibbs_hybrid`),
    for targets where some coordinates have no useful gradient

All sampling happens in unconstrained space; densities pick up the log
Jacobian of the coordinate transform, and draws are reported back in
constrained space.  Chains draw from independent spawned RNG streams, so a
run is bit-reproducible given (model, config, seed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import DivergentTrajectory, NonFiniteDensity
from .transforms import VectorTransform

DIVERGENCE_ENERGY = 1000.0
_FD_STEP = 1e-5


@dataclass
class ProbModel:
    """Target density in constrained space plus the coordinate transform.

    `log_density` must be finite on the image of the transform.
    `grad_log_density` (constrained-space gradient) is optional; samplers
    fall back to central finite differences in unconstrained space.
    """

    dim: int
    log_density: Callable[[np.ndarray], float]
    transform: VectorTransform
    grad_log_density: Callable[[np.ndarray], np.ndarray] | None = None
    init: np.ndarray | None = None

    def initial_unconstrained(self) -> np.ndarray:
        if self.init is not None:
            return self.transform.inverse(np.asarray(self.init, dtype=float))
        return np.zeros(self.dim)


@dataclass
class McmcConfig:
    num_warmup: int = 1000
    num_samples: int = 1000
    num_chains: int = 4
    seed: int = 0
    target_accept: float = 0.8
    leapfrog_steps: int = 32
    init_step_size: float = 0.1
    init_jitter: float = 0.0  # per-chain N(0, jitter) offset in unconstrained space

    def __post_init__(self):
        if min(self.num_warmup, self.num_samples, self.num_chains) < 1:
            raise ValueError("counts must be positive")
        if not 0.0 < self.target_accept < 1.0:
            raise ValueError("target_accept must lie in (0, 1)")


@dataclass
class Chain:
    """Posterior draws for one chain, in constrained space."""

    draws: np.ndarray
    accept_rate: float
    divergences: int = 0


def chains_to_csv(chains: Sequence["Chain"], names: Sequence[str]) -> str:
    """Concatenated draws as CSV, one column per constrained parameter."""
    import csv as _csv
    import io as _io

    out = _io.StringIO()
    writer = _csv.writer(out, lineterminator="\n")
    writer.writerow(names)
    for chain in chains:
        for row in chain.draws:
            writer.writerow([f"{v:.10g}" for v in row])
    return out.getvalue()


class _Target:
    """Unconstrained-space view of a ProbModel."""

    def __init__(self, model: ProbModel):
        self.model = model
        self.transform = model.transform

    def logp(self, z: np.ndarray) -> float:
        x = self.transform.forward(z)
        lp = self.model.log_density(x)
        if math.isnan(lp):
            return -math.inf
        return lp + self.transform.log_jac(z)

    def grad(self, z: np.ndarray) -> np.ndarray:
        if self.model.grad_log_density is not None:
            x = self.transform.forward(z)
            gx = np.asarray(self.model.grad_log_density(x), dtype=float)
            return gx * self.transform.d_forward(z) + self.transform.d_log_jac(z)
        return self.grad_block(z, range(len(z)))

    def grad_block(self, z: np.ndarray, indices) -> np.ndarray:
        """Gradient restricted to a coordinate block (finite differences)."""
        if self.model.grad_log_density is not None:
            return self.grad(z)[list(indices)]
        out = np.empty(len(list(indices)))
        zt = z.copy()
        for k, idx in enumerate(indices):
            orig = zt[idx]
            zt[idx] = orig + _FD_STEP
            hi = self.logp(zt)
            zt[idx] = orig - _FD_STEP
            lo = self.logp(zt)
            zt[idx] = orig
            out[k] = (hi - lo) / (2.0 * _FD_STEP)
        return out


def _chain_rngs(seed: int, num_chains: int) -> list[np.random.Generator]:
    root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.PCG64(s)) for s in root.spawn(num_chains)]


def leapfrog(q: np.ndarray, p: np.ndarray, eps: float, L: int,
             grad: Callable[[np.ndarray], np.ndarray],
             log_density: Callable[[np.ndarray], float] | None = None
             ) -> tuple[np.ndarray, np.ndarray]:
    """Kick-drift-kick leapfrog with unit mass matrix.

    When `log_density` is supplied the Hamiltonian error is checked and a
    DivergentTrajectory is raised if it exceeds the divergence threshold.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if L < 1:
        raise ValueError("L must be >= 1")
    q = np.asarray(q, dtype=float).copy()
    p = np.asarray(p, dtype=float).copy()
    if log_density is not None:
        h0 = -log_density(q) + 0.5 * float(p @ p)
    p = p + 0.5 * eps * grad(q)
    for step in range(L):
        q = q + eps * p
        if step != L - 1:
            p = p + eps * grad(q)
    p = p + 0.5 * eps * grad(q)
    if log_density is not None:
        h1 = -log_density(q) + 0.5 * float(p @ p)
        if not math.isfinite(h1) or abs(h1 - h0) > DIVERGENCE_ENERGY:
            raise DivergentTrajectory(f"|dH| = {abs(h1 - h0):.3g}")
    return q, p


class _DualAveraging:
    """Nesterov dual averaging of the HMC step size (Hoffman & Gelman 2014)."""

    def __init__(self, eps0: float, target: float,
                 gamma: float = 0.05, t0: float = 10.0, kappa: float = 0.75):
        self.mu = math.log(10.0 * eps0)
        self.target = target
        self.gamma = gamma
        self.t0 = t0
        self.kappa = kappa
        self.log_eps = math.log(eps0)
        self.log_eps_bar = 0.0
        self.h_bar = 0.0
        self.m = 0

    def update(self, accept_prob: float) -> float:
        self.m += 1
        frac = 1.0 / (self.m + self.t0)
        self.h_bar = (1.0 - frac) * self.h_bar + frac * (self.target - accept_prob)
        self.log_eps = self.mu - math.sqrt(self.m) / self.gamma * self.h_bar
        eta = self.m ** (-self.kappa)
        self.log_eps_bar = eta * self.log_eps + (1.0 - eta) * self.log_eps_bar
        return math.exp(self.log_eps)

    def adapted(self) -> float:
        return math.exp(self.log_eps_bar)


def _hmc_update(target: _Target, z: np.ndarray, lp: float, eps: float, L: int,
                rng: np.random.Generator, indices=None
                ) -> tuple[np.ndarray, float, float, bool]:
    """One Metropolis-corrected HMC proposal on a coordinate block.

    Returns (z, logp, accept_prob, divergent).
    """
    if indices is None:
        indices = list(range(len(z)))
    p0 = rng.standard_normal(len(indices))

    def block_grad(qb):
        zt = z.copy()
        zt[indices] = qb
        return target.grad_block(zt, indices)

    q = z[indices].copy()
    p = p0.copy()
    p = p + 0.5 * eps * block_grad(q)
    for step in range(L):
        q = q + eps * p
        if step != L - 1:
            p = p + eps * block_grad(q)
    p = p + 0.5 * eps * block_grad(q)

    z_new = z.copy()
    z_new[indices] = q
    lp_new = target.logp(z_new)
    with np.errstate(over="ignore"):
        h0 = -lp + 0.5 * float(p0 @ p0)
        h1 = -lp_new + 0.5 * float(p @ p)
    delta = h1 - h0
    if not math.isfinite(delta) or delta > DIVERGENCE_ENERGY:
        return z, lp, 0.0, True
    accept_prob = min(1.0, math.exp(-delta)) if delta > 0 else 1.0
    if rng.random() < accept_prob:
        return z_new, lp_new, accept_prob, False
    return z, lp, accept_prob, False


def _rw_update(target: _Target, z: np.ndarray, lp: float, scale: np.ndarray,
               rng: np.random.Generator, indices=None
               ) -> tuple[np.ndarray, float, bool]:
    """One Gaussian random-walk Metropolis proposal on a coordinate block."""
    if indices is None:
        indices = list(range(len(z)))
    z_new = z.copy()
    z_new[indices] = z[indices] + scale * rng.standard_normal(len(indices))
    lp_new = target.logp(z_new)
    if math.log(rng.random()) < lp_new - lp:
        return z_new, lp_new, True
    return z, lp, False


def _check_init(target: _Target, z0: np.ndarray) -> float:
    lp = target.logp(z0)
    if not math.isfinite(lp):
        raise NonFiniteDensity(f"log density not finite at initialization: {lp}")
    return lp


def _initial_point(model: ProbModel, target: _Target, cfg: McmcConfig,
                   rng: np.random.Generator) -> np.ndarray:
    """Chain start point, jittered per chain when configured."""
    z0 = model.initial_unconstrained().astype(float)
    if cfg.init_jitter > 0:
        for _ in range(10):
            cand = z0 + cfg.init_jitter * rng.standard_normal(model.dim)
            if math.isfinite(target.logp(cand)):
                return cand
    return z0


def sample_rwmh(model: ProbModel, cfg: McmcConfig,
                proposal_scale) -> list[Chain]:
    """Random-walk Metropolis-Hastings; returns one Chain per configured chain."""
    scale = np.broadcast_to(np.asarray(proposal_scale, dtype=float),
                            (model.dim,)).copy()
    if np.any(scale <= 0):
        raise ValueError("proposal_scale must be positive")
    target = _Target(model)
    chains = []
    for rng in _chain_rngs(cfg.seed, cfg.num_chains):
        z = _initial_point(model, target, cfg, rng)
        lp = _check_init(target, z)
        draws = np.empty((cfg.num_samples, model.dim))
        accepted = 0
        for it in range(cfg.num_warmup + cfg.num_samples):
            z, lp, acc = _rw_update(target, z, lp, scale, rng)
            if it >= cfg.num_warmup:
                draws[it - cfg.num_warmup] = target.transform.forward(z)
                accepted += acc
        chains.append(Chain(draws=draws, accept_rate=accepted / cfg.num_samples))
    return chains


def sample_hmc(model: ProbModel, cfg: McmcConfig) -> list[Chain]:
    """HMC with warmup dual averaging; adaptation frozen after warmup."""
    target = _Target(model)
    chains = []
    for rng in _chain_rngs(cfg.seed, cfg.num_chains):
        z = _initial_point(model, target, cfg, rng)
        lp = _check_init(target, z)
        adapt = _DualAveraging(cfg.init_step_size, cfg.target_accept)
        eps = cfg.init_step_size
        draws = np.empty((cfg.num_samples, model.dim))
        accept_sum = 0.0
        divergences = 0
        for it in range(cfg.num_warmup + cfg.num_samples):
            z, lp, aprob, div = _hmc_update(
                target, z, lp, eps, cfg.leapfrog_steps, rng)
            if it < cfg.num_warmup:
                eps = adapt.update(aprob)
                if it == cfg.num_warmup - 1:
                    eps = adapt.adapted()
            else:
                draws[it - cfg.num_warmup] = target.transform.forward(z)
                accept_sum += aprob
                divergences += div
        chains.append(Chain(draws=draws,
                            accept_rate=accept_sum / cfg.num_samples,
                            divergences=divergences))
    return chains


@dataclass(frozen=True)
class GibbsBlock:
    """One block of coordinate indices with its transition kernel."""

    indices: tuple[int, ...]
    kernel: str  # "hmc" | "rwmh"
    leapfrog_steps: int | None = None
    proposal_scale: float = 0.5
    target_accept: float | None = None  # rwmh default 0.4, hmc uses cfg


def sample_gibbs_hybrid(model: ProbModel, cfg: McmcConfig,
                        blocks: Sequence[GibbsBlock]) -> list[Chain]:
    """Metropolis-within-Gibbs sweep over blocks; one sweep = one draw."""
    covered = sorted(idx for b in blocks for idx in b.indices)
    if covered != list(range(model.dim)):
        raise ValueError("blocks must partition the parameter indices")
    target = _Target(model)
    chains = []
    for rng in _chain_rngs(cfg.seed, cfg.num_chains):
        z = _initial_point(model, target, cfg, rng)
        lp = _check_init(target, z)
        state = []
        for b in blocks:
            if b.kernel == "hmc":
                state.append({
                    "adapt": _DualAveraging(
                        cfg.init_step_size, b.target_accept or cfg.target_accept),
                    "eps": cfg.init_step_size,
                    "L": b.leapfrog_steps or cfg.leapfrog_steps,
                })
            elif b.kernel == "rwmh":
                state.append({
                    "log_scale": math.log(b.proposal_scale),
                    "target": b.target_accept or 0.4,
                })
            else:
                raise ValueError(f"unknown kernel {b.kernel!r}")
        draws = np.empty((cfg.num_samples, model.dim))
        accept_sums = np.zeros(len(blocks))
        divergences = 0
        for it in range(cfg.num_warmup + cfg.num_samples):
            warm = it < cfg.num_warmup
            for k, b in enumerate(blocks):
                st = state[k]
                if b.kernel == "hmc":
                    z, lp, aprob, div = _hmc_update(
                        target, z, lp, st["eps"], st["L"], rng, list(b.indices))
                    if warm:
                        st["eps"] = st["adapt"].update(aprob)
                        if it == cfg.num_warmup - 1:
                            st["eps"] = st["adapt"].adapted()
                    else:
                        accept_sums[k] += aprob
                        divergences += div
                else:
                    z, lp, acc = _rw_update(
                        target, z, lp, math.exp(st["log_scale"]), rng,
                        list(b.indices))
                    if warm:
                        st["log_scale"] += (acc - st["target"]) * (it + 1) ** -0.6
                    else:
                        accept_sums[k] += acc
            if not warm:
                draws[it - cfg.num_warmup] = target.transform.forward(z)
        chains.append(Chain(draws=draws,
                            accept_rate=float(accept_sums.mean()) / cfg.num_samples,
                            divergences=divergences))
    return chains
