"""Convergence diagnostics: split R-hat and bulk effective sample size."""
from __future__ import annotations

import numpy as np

from ..errors import TooFewDraws
from .engine import Chain


def _split(draws_by_chain: list[np.ndarray]) -> np.ndarray:
    """Stack chains split in half: (2 * num_chains, n_half, dim)."""
    halves = []
    for d in draws_by_chain:
        n = d.shape[0] // 2
        halves.append(d[:n])
        halves.append(d[n:2 * n])
    return np.stack(halves)


def _rhat(seqs: np.ndarray) -> np.ndarray:
    """Split R-hat per parameter from (m, n, dim) sequences."""
    m, n, dim = seqs.shape
    means = seqs.mean(axis=1)              # (m, dim)
    variances = seqs.var(axis=1, ddof=1)   # (m, dim)
    w = variances.mean(axis=0)
    b_over_n = means.var(axis=0, ddof=1)
    var_plus = (n - 1) / n * w + b_over_n
    out = np.empty(dim)
    for j in range(dim):
        if w[j] == 0.0:
            out[j] = 1.0 if b_over_n[j] == 0.0 else np.inf
        else:
            out[j] = np.sqrt(var_plus[j] / w[j])
    return out


def _autocorr(x: np.ndarray) -> np.ndarray:
    """Autocorrelation of a 1-D sequence via FFT."""
    n = len(x)
    xc = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:n].real / n
    if acov[0] <= 0:
        return np.zeros(n)
    return acov / acov[0]


def _ess(seqs: np.ndarray) -> np.ndarray:
    """Bulk ESS per parameter from (m, n, dim) split sequences."""
    m, n, dim = seqs.shape
    out = np.empty(dim)
    for j in range(dim):
        chains = seqs[:, :, j]
        chain_vars = chains.var(axis=1, ddof=1)
        w = chain_vars.mean()
        var_plus = (n - 1) / n * w + chains.mean(axis=1).var(ddof=1)
        if var_plus == 0.0 or w == 0.0:
            out[j] = float(m * n)
            continue
        rho_chains = np.stack([_autocorr(chains[c]) for c in range(m)])
        # combined autocorrelation (Stan): 1 - (W - mean_c s_c^2 rho_c) / var+
        rho = 1.0 - (w - (chain_vars[:, None] * rho_chains).mean(axis=0)) / var_plus
        # Geyer initial monotone positive sequence over lag pairs
        tau = 0.0
        prev = np.inf
        for k in range(0, n - 1, 2):
            pair = rho[k] + (rho[k + 1] if k + 1 < n else 0.0)
            if pair < 0:
                break
            pair = min(pair, prev)
            prev = pair
            tau += pair
        tau = max(2.0 * tau - 1.0, 1.0 / np.log10(m * n + 10))
        out[j] = min(m * n / tau, float(m * n))
    return out


def diagnostics(chains: list[Chain]) -> dict[str, np.ndarray]:
    """Split R-hat and bulk ESS per parameter across >= 2 equal-length chains."""
    if len(chains) < 2:
        raise TooFewDraws("need at least 2 chains")
    lengths = {c.draws.shape[0] for c in chains}
    if len(lengths) != 1:
        raise ValueError("chains must have equal lengths")
    n = lengths.pop()
    if n // 2 < 4:
        raise TooFewDraws("need at least 4 draws per split half")
    seqs = _split([c.draws for c in chains])
    return {"rhat": _rhat(seqs), "ess": _ess(seqs)}
