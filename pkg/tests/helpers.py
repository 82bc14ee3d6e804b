"""Shared test utilities."""

import numpy as np

from polariton import DensityMatrix, SystemParams, TruncationConfig


def random_density(rng: np.random.Generator, dim: int,
                   dims: tuple[int, ...] = ()) -> DensityMatrix:
    """A random full-rank density matrix (Wishart construction)."""
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = A @ A.conj().T
    rho /= np.trace(rho).real
    return DensityMatrix(rho, dims or (dim,))


def random_composite_density(rng: np.random.Generator, cfg: TruncationConfig) -> DensityMatrix:
    return random_density(rng, cfg.dim, cfg.dims)


def random_params(rng: np.random.Generator, driven: str = "b") -> SystemParams:
    """Physically shaped random parameters with one drive active."""
    vals = dict(
        delta_a=rng.uniform(-8, 8), delta_b=rng.uniform(-8, 8), delta_q=rng.uniform(-8, 8),
        g=rng.uniform(0, 6), f=rng.uniform(0, 8),
        kappa_a=rng.uniform(0.1, 8), kappa_b=rng.uniform(0.1, 8), gamma=1.0,
        eta_a=0.0, eta_b=0.0,
    )
    if driven == "a":
        vals["eta_a"] = rng.uniform(0.05, 0.8)
    elif driven == "b":
        vals["eta_b"] = rng.uniform(0.05, 0.8)
    return SystemParams(**vals)


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    """Truncated coherent-state amplitudes, re-normalised."""
    n = np.arange(dim)
    from scipy.special import gammaln
    log_amp = n * np.log(np.abs(alpha) + 1e-300) - 0.5 * gammaln(n + 1.0)
    vec = np.exp(log_amp - 0.5 * abs(alpha) ** 2) * np.exp(1j * n * np.angle(alpha))
    return vec / np.linalg.norm(vec)
