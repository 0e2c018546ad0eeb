"""Monte Carlo bond prices and the martingale test of discounted bond prices."""
import logging
import math
from dataclasses import dataclass
from typing import final

import numpy as np

from core.errors import InvalidInputError
from core.helpers import as_vector, validate_number
from riccati.separable import SeparableFamily
from simulate.paths import DEFAULT_CHUNK_SIZE, run_chunks

logger = logging.getLogger(__name__)

MINIMUM_PATHS = 100
ZERO_DIFFERENCE = 1e-12
SEED_RETRIES = 3


@final
@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo mean with its standard error (sample stddev / √n)."""

    mean: float
    standard_error: float
    n_paths: int
    flagged: int = 0

    def within(self, reference, multiples=3.0):
        return abs(self.mean - reference) <= multiples * self.standard_error

    def to_dict(self):
        return {
            "mean": self.mean,
            "standard_error": self.standard_error,
            "n_paths": self.n_paths,
            "flagged": self.flagged,
        }


@final
@dataclass(frozen=True)
class MartingaleReport:
    """Comparison of E[D(t, T)] with P(0, T).

    @property expected_discounted:  Monte Carlo estimate of E[P(t, T)/B_t].
    @property bond_price:           P(0, T) from the curve family.
    @property z_score:              (estimate - P(0, T)) / standard error.
    """

    expected_discounted: MCEstimate
    bond_price: float
    z_score: float

    def passed(self, threshold=3.0):
        return abs(self.z_score) < threshold

    def to_dict(self):
        return {
            "expected_discounted": self.expected_discounted.mean,
            "standard_error": self.expected_discounted.standard_error,
            "n_paths": self.expected_discounted.n_paths,
            "flagged": self.expected_discounted.flagged,
            "bond_price": self.bond_price,
            "z_score": self.z_score,
        }


def summarize(values, flagged=0):
    """Return the MCEstimate of a sample using compensated summation."""
    values = np.asarray(values, dtype=float)
    count = values.size
    mean = math.fsum(values) / count
    variance = math.fsum((values - mean) ** 2) / (count - 1) if count > 1 else 0.0
    return MCEstimate(mean, math.sqrt(variance / count), count, flagged)


def affine_short_rate(theta):
    """Return r(x) = θ₀ + Σ θᵢxᵢ as a batched callable."""
    theta = as_vector(theta, "theta")
    return lambda states: theta[0] + states @ theta[1:]


def family_short_rate(family):
    """Return the batched short rate x -> G(0, x) of a curve family."""
    if isinstance(family, SeparableFamily):
        h0 = family.maturity.h(0.0)
        basis = family.basis
        if basis.is_affine:
            return affine_short_rate(h0)
        return lambda states: np.array([h0 @ basis.values(state) for state in states])
    return lambda states: np.array([family.value(0.0, state) for state in states])


def family_integrals(family, tau, states):
    """Return IG(τ, x) for every row of states."""
    if isinstance(family, SeparableFamily):
        H_vals = family.maturity.H(tau)
        if family.basis.is_affine:
            return H_vals[0] + states @ H_vals[1:]
        return np.array([H_vals @ family.basis.values(state) for state in states])
    return np.array([family.integral(tau, state) for state in states])


def retry_seeds(attempt, seed, accept, retries=SEED_RETRIES):
    """Run attempt(seed), attempt(seed + 1), ... until accept(result) holds.

    A Monte Carlo check is declared failed only when every one of the `retries`
    consecutive seeds fails it.

    @param  attempt:    Callable seed -> result.
    @param  seed:       First seed.
    @param  accept:     Callable result -> bool.
    @param  retries:    Number of seeds to try (>= 1).
    @throw  InvalidInputError: If retries < 1.
    @retval Tuple (last result, number of seeds tried)
    """
    if int(retries) < 1:
        raise InvalidInputError(f"retries should be >= 1, got {retries}")
    for tried in range(1, int(retries) + 1):
        result = attempt(seed + tried - 1)
        if accept(result):
            return result, tried
        logger.info("seed %d failed the check", seed + tried - 1)
    logger.warning("all %d seeds from %d failed the check", int(retries), seed)
    return result, int(retries)


def _check_paths(n_paths):
    if int(n_paths) < MINIMUM_PATHS:
        raise InvalidInputError(f"n_paths should be >= {MINIMUM_PATHS}, got {n_paths}")
    return int(n_paths)


def mc_bond_price(
    model, short_rate, x0, T, dt, n_paths, seed, antithetic=False,
    chunk_size=DEFAULT_CHUNK_SIZE, workers=None,
):
    """Estimate P(0, T) = E[exp(-∫₀^T r(X_s) ds)] by simulation.

    @param  model:      JumpDiffusionModel.
    @param  short_rate: Callable mapping a (k, n) state array to k short rates,
                        or a ForwardCurveFamily whose G(0, x) is used.
    @param  n_paths:    At least 100 paths.
    @retval MCEstimate
    """
    n_paths = _check_paths(n_paths)
    if not callable(short_rate):
        short_rate = family_short_rate(short_rate)
    results = run_chunks(
        model, x0, T, dt, n_paths, seed, short_rate, antithetic, chunk_size, workers
    )
    discounts = np.concatenate([np.exp(-result.rate_integrals) for result in results])
    flagged = sum(int(result.flagged.sum()) for result in results)
    estimate = summarize(discounts, flagged)
    logger.info(
        "Monte Carlo bond price %.10f ± %.2e (%d paths)",
        estimate.mean, estimate.standard_error, n_paths,
    )
    return estimate


def martingale_test(
    model, family, x0, t, T, dt, n_paths, seed, antithetic=False,
    chunk_size=DEFAULT_CHUNK_SIZE, workers=None,
):
    """Compare E[P(t, T)/B_t] with P(0, T) for a model and curve family.

    P(t, T) = exp(-IG(T - t, X_t)) and B_t = exp(∫₀^t G(0, X_s) ds) is the money
    market account; the discounted bond price is a martingale exactly when the
    model is consistent with the family, so |z| stays small.

    @throw  InvalidInputError: Unless 0 < t < T.
    @retval MartingaleReport
    """
    t = validate_number(t, "t")
    T = validate_number(T, "T")
    if not 0.0 < t < T:
        raise InvalidInputError(f"need 0 < t < T, got t={t}, T={T}")
    n_paths = _check_paths(n_paths)
    x0 = as_vector(x0, "x0", dimension=model.dimension)
    results = run_chunks(
        model, x0, t, dt, n_paths, seed, family_short_rate(family), antithetic, chunk_size, workers
    )
    discounted = np.concatenate(
        [
            np.exp(-family_integrals(family, T - t, result.final_states) - result.rate_integrals)
            for result in results
        ]
    )
    flagged = sum(int(result.flagged.sum()) for result in results)
    estimate = summarize(discounted, flagged)
    price = math.exp(-family.integral(T, x0))
    difference = estimate.mean - price
    if estimate.standard_error > 0.0:
        z_score = difference / estimate.standard_error
    elif abs(difference) <= ZERO_DIFFERENCE:
        z_score = 0.0
    else:
        z_score = math.copysign(math.inf, difference)
    logger.info("martingale test: E[D]=%.10f, P(0,T)=%.10f, z=%.3f", estimate.mean, price, z_score)
    return MartingaleReport(estimate, price, z_score)
