"""Single-step Black-Scholes Monte-Carlo model and digital-option references."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError
from .randomvar import RandomVariable
from .tape import DifferentiableRV, Tape


@dataclass(frozen=True)
class BlackScholesParams:
    S0: float = 1.0
    r: float = 0.05
    sigma: float = 0.5
    T: float = 1.0

    def __post_init__(self):
        if not (self.S0 > 0 and self.sigma > 0 and self.T > 0):
            raise ValueError("S0, sigma and T must be positive")

    @property
    def discount_factor(self) -> float:
        return math.exp(-self.r * self.T)

    @property
    def drift(self) -> float:
        """Log drift ``(r - sigma^2/2) T`` of the terminal value."""
        return (self.r - 0.5 * self.sigma ** 2) * self.T

    @property
    def vol_sqrt_t(self) -> float:
        return self.sigma * math.sqrt(self.T)


@dataclass(frozen=True)
class DigitalOption:
    """Pays ``1_{S_T > K}`` at ``T``."""

    K: float = 1.05
    T: float = 1.0

    def __post_init__(self):
        if not self.K > 0:
            raise ValueError("strike must be positive")


REFERENCE_PARAMS = BlackScholesParams(S0=1.0, r=0.05, sigma=0.5, T=1.0)
REFERENCE_OPTION = DigitalOption(K=1.05, T=1.0)


def standard_normals(n: int, seed: int) -> np.ndarray:
    """``n`` standard normals by inverse transform of a seeded MT19937 stream.

    Uses numpy's ``RandomState``, which seeds MT19937 with the reference
    ``init_genrand`` and draws 53-bit uniforms in ``[0, 1)``. An exact 0 is
    moved to ``2**-54`` so every normal is finite.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = np.random.RandomState(seed).random_sample(n)
    u[u == 0.0] = 2.0 ** -54
    return ndtri(u)


def _check_maturity(params: BlackScholesParams, option: DigitalOption):
    if not math.isclose(params.T, option.T):
        raise ValueError(f"option maturity {option.T} differs from model horizon {params.T}")


def terminal_growth(params: BlackScholesParams, normals: np.ndarray) -> np.ndarray:
    """``S_T / S0 = exp((r - sigma^2/2) T + sigma sqrt(T) Z)``."""
    return np.exp(params.drift + params.vol_sqrt_t * normals)


def generate_terminal(params: BlackScholesParams, n: int, seed: int,
                      normals: np.ndarray | None = None) -> RandomVariable:
    """Samples of ``S_T``; deterministic per ``(seed, n)``."""
    if normals is None:
        normals = standard_normals(n, seed)
    return RandomVariable._wrap(params.S0 * terminal_growth(params, normals))


@dataclass
class TapedModel:
    """Terminal value recorded on a tape together with its parameter inputs."""

    tape: Tape
    S0: DifferentiableRV
    r: DifferentiableRV
    sigma: DifferentiableRV
    S_T: DifferentiableRV

    def discount_factor(self, T: float) -> DifferentiableRV:
        return (self.r * (-T)).exp()


def terminal_on_tape(params: BlackScholesParams, normals: np.ndarray,
                     tape: Tape | None = None) -> TapedModel:
    """Record ``S_T = S0 exp((r - sigma^2/2) T + sigma sqrt(T) Z)`` with S0, r, sigma as inputs."""
    tape = tape or Tape()
    s0 = tape.input(params.S0, name="S0")
    r = tape.input(params.r, name="r")
    sigma = tape.input(params.sigma, name="sigma")
    z = tape.constant(RandomVariable(normals))
    T = params.T
    exponent = (r - sigma.square() * 0.5) * T + sigma * (math.sqrt(T) * z)
    return TapedModel(tape, s0, r, sigma, s0 * exponent.exp())


def _d_minus(params: BlackScholesParams, K: float) -> float:
    return (math.log(params.S0 / K) + params.drift) / params.vol_sqrt_t


def analytic_digital_value(params: BlackScholesParams, K: float) -> float:
    """``e^{-rT} N(d_-)``."""
    return params.discount_factor * float(ndtr(_d_minus(params, K)))


def analytic_digital_delta(params: BlackScholesParams, K: float) -> float:
    """``e^{-rT} n(d_-) / (S0 sigma sqrt(T))``."""
    d = _d_minus(params, K)
    pdf = math.exp(-0.5 * d * d) / math.sqrt(2.0 * math.pi)
    return params.discount_factor * pdf / (params.S0 * params.vol_sqrt_t)


def terminal_density(params: BlackScholesParams, s: float) -> float:
    """Lognormal density of ``S_T`` at ``s``; equals the density of ``S_T - K`` at ``s - K``."""
    if not s > 0:
        return 0.0
    y = (math.log(s / params.S0) - params.drift) / params.vol_sqrt_t
    return math.exp(-0.5 * y * y) / (math.sqrt(2.0 * math.pi) * s * params.vol_sqrt_t)


def likelihood_ratio_delta_weight(params: BlackScholesParams, s_t) -> RandomVariable:
    """Score ``[ln(S_T/S0) - (r - sigma^2/2)T] / (S0 sigma^2 T)`` of the delta."""
    s_t = RandomVariable(s_t)
    values = s_t.as_array()
    if np.any(values <= 0.0):
        raise DomainError("terminal values must be positive")
    weight = (np.log(values / params.S0) - params.drift) / (params.S0 * params.sigma ** 2 * params.T)
    return RandomVariable._wrap(weight)
