"""Scalar numerics shared by every other module.

Gaussian cdf evaluation (linear and log domain), a deterministic
bracketing root solver, log-binomials, and a seeded Gaussian sampler
with a fixed draw-count contract.
"""

import math

import numpy as np
from scipy.special import erfcx

SQRT2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)

_MASK64 = (1 << 64) - 1


class DomainError(ValueError):
    """Argument outside the mathematical domain of the operation."""


class NoSignChange(ArithmeticError):
    """Bracket endpoints do not straddle a root."""


def std_normal_cdf(x: float) -> float:
    """Unit Gaussian cdf via the complementary error function.

    Saturates cleanly at 0.0 / 1.0 in the extreme tails.
    """
    return 0.5 * math.erfc(-x / SQRT2)


def log_std_normal_cdf(x: float) -> float:
    """Natural log of the unit Gaussian cdf, finite far into the left tail.

    For x < -5 the scaled complementary error function is used, so the
    result stays finite (about -804.6 at x = -40) where the linear-domain
    cdf has long underflowed.
    """
    if x >= -5.0:
        return math.log(std_normal_cdf(x))
    return math.log(0.5) + math.log(erfcx(-x / SQRT2)) - 0.5 * x * x


def bisect_root(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Bisection on [lo, hi]; requires a sign change over the bracket.

    Deterministic: always returns the midpoint of the final bracket,
    after the bracket width has shrunk below tol.

    Raises NoSignChange when f(lo) * f(hi) > 0; the caller decides what
    a missing root means.
    """
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise NoSignChange(f"no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def log_binomial(n: int, d: int) -> float:
    """ln C(n, d) via log-gamma."""
    if d < 0 or n < 0 or d > n:
        raise DomainError(f"C({n}, {d}) undefined")
    return math.lgamma(n + 1) - math.lgamma(d + 1) - math.lgamma(n - d + 1)


class RngStream:
    """Seeded random stream with a reproducible draw count.

    Uniforms come from a PCG64 generator; Gaussians are produced by the
    Box-Muller transform.  Every Gaussian consumes exactly one fresh
    uniform pair (the sine branch is discarded), so the stream position
    advances by two per Gaussian regardless of call pattern.  Identical
    seeds give identical sequences.

    A stream is single-owner: never draw from one stream in two
    concurrent activities.  Parallel work derives one stream per unit of
    work instead.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._gen = np.random.Generator(np.random.PCG64(self.seed))
        self._draws = 0

    @property
    def position(self) -> int:
        """Number of uniform draws consumed so far."""
        return self._draws

    def uniform(self) -> float:
        self._draws += 1
        return float(self._gen.random())

    def bits(self, n: int) -> np.ndarray:
        """n equiprobable bits, one uniform draw per bit."""
        self._draws += n
        return (self._gen.random(n) < 0.5).astype(np.uint8)

    def gaussians(self, n: int, mean: float = 0.0, stddev: float = 1.0) -> np.ndarray:
        """n independent N(mean, stddev^2) draws."""
        if stddev <= 0.0:
            raise DomainError("stddev must be positive")
        self._draws += 2 * n
        u = self._gen.random(2 * n)
        u1 = 1.0 - u[0::2]  # (0, 1]: keeps log finite
        u2 = u[1::2]
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
        return mean + stddev * z

    def gaussian(self, mean: float = 0.0, stddev: float = 1.0) -> float:
        return float(self.gaussians(1, mean, stddev)[0])
