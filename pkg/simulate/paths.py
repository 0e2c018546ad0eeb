"""Euler-Maruyama simulation of the state SDE with Bernoulli jumps per step.

Paths are generated in chunks. Chunk k draws from the k-th child of
numpy.random.SeedSequence(seed), so every path is reproducible from
(seed, chunk size, path index) whatever the order in which chunks run.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import final

import numpy as np

from core.errors import InvalidInputError, StepSizeError
from core.helpers import as_vector, validate_positive
from core.output import write_csv

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 10_000
JUMP_PROBABILITY_WARNING = 0.1


@final
@dataclass(frozen=True)
class SimPath:
    """One simulated path.

    @property times:        Grid 0, dt, …, T.
    @property states:       Array (steps + 1, n).
    @property jump_times:   Times of the jumps (strictly increasing).
    @property jump_marks:   Array (jumps, n) of the jump sizes.
    @property seed:         Seed of the path.
    @property flagged:      True if the path left the domain box.
    """

    times: np.ndarray
    states: np.ndarray
    jump_times: np.ndarray
    jump_marks: np.ndarray
    seed: int
    flagged: bool = False

    @property
    def final_state(self):
        return self.states[-1]

    def to_csv(self, path):
        dimension = self.states.shape[1]
        jumped = set(np.round(self.jump_times / max(self.times[1], 1e-300)).astype(int).tolist())
        header = ["t", *(f"x{i + 1}" for i in range(dimension)), "jump"]
        rows = (
            [t, *state.tolist(), int(index in jumped)]
            for index, (t, state) in enumerate(zip(self.times, self.states))
        )
        write_csv(path, header, rows)


@dataclass
class ChunkResult:
    """Per-chunk outcome of the vectorized engine."""

    final_states: np.ndarray
    rate_integrals: np.ndarray
    jump_counts: np.ndarray
    flagged: np.ndarray
    states: list = field(default_factory=list)
    jump_events: list = field(default_factory=list)


def time_grid(T, dt):
    """Return (steps, dt) with steps·dt = T; dt is adjusted to divide T."""
    T = validate_positive(T, "T")
    dt = validate_positive(dt, "dt")
    if T < dt * (1.0 - 1e-12):
        raise InvalidInputError(f"T={T} should be >= dt={dt}")
    steps = max(1, int(round(T / dt)))
    if abs(steps * dt - T) > 1e-9 * T:
        logger.debug("dt=%g does not divide T=%g; using %g", dt, T, T / steps)
    return steps, T / steps


def _outside(domain, states):
    above = np.where(domain.open_lower, states > domain.lower, states >= domain.lower)
    return ~(above.all(axis=1) & (states <= domain.upper).all(axis=1))


def simulate_chunk(
    model, x0, steps, dt, count, seed_sequence, short_rate=None, antithetic=False, record=False
):
    """Simulate `count` paths and return a ChunkResult.

    @param  short_rate: (optional) Callable on (k, n) state arrays; its time
                        integral along each path is accumulated by the trapezoid rule.
    @param  antithetic: Pair each Gaussian increment Z with -Z; the last path of an odd
                        count is left unpaired.
    @param  record:     Keep every state and jump event (single-path use).
    @throw  StepSizeError: If λ(x)·dt > 1 at some state.
    """
    rng = np.random.default_rng(seed_sequence)
    n = model.dimension
    states = np.tile(x0, (count, 1))
    flagged = np.zeros(count, dtype=bool)
    jump_counts = np.zeros(count, dtype=np.int64)
    integrals = np.zeros(count)
    rate = short_rate(states) if short_rate is not None else None
    history = [states.copy()] if record else []
    events = []
    warned = False
    root_dt = math.sqrt(dt)
    for step in range(steps):
        if antithetic:
            half = rng.standard_normal(((count + 1) // 2, n))
            shocks = np.concatenate((half, -half))[:count]
        else:
            shocks = rng.standard_normal((count, n))
        increment = model.b(states) * dt + np.einsum("kij,kj->ki", model.c(states), shocks) * root_dt
        if model.has_jumps:
            probability = model.intensity(states) * dt
            if (probability > 1.0).any():
                raise StepSizeError(
                    f"jump probability λ·dt={probability.max():.3g} exceeds 1; use a smaller dt"
                )
            if not warned and (probability > JUMP_PROBABILITY_WARNING).any():
                logger.warning(
                    "jump probability λ·dt=%.3g per step is above %.1f; consider a smaller dt",
                    probability.max(), JUMP_PROBABILITY_WARNING,
                )
                warned = True
            jumped = np.flatnonzero(rng.random(count) < probability)
            if jumped.size:
                marks = model.jumps.sample(rng, jumped.size)
                increment[jumped] += marks
                jump_counts[jumped] += 1
                if record:
                    events.extend(((step + 1) * dt, mark) for mark in marks)
        states = states + increment
        flagged |= _outside(model.domain, states)
        if short_rate is not None:
            next_rate = short_rate(states)
            integrals += 0.5 * dt * (rate + next_rate)
            rate = next_rate
        if record:
            history.append(states.copy())
    return ChunkResult(states, integrals, jump_counts, flagged, history, events)


def chunk_sizes(n_paths, chunk_size):
    sizes = [chunk_size] * (n_paths // chunk_size)
    if n_paths % chunk_size:
        sizes.append(n_paths % chunk_size)
    return sizes


def run_chunks(
    model, x0, T, dt, n_paths, seed, short_rate=None, antithetic=False,
    chunk_size=DEFAULT_CHUNK_SIZE, workers=None,
):
    """Simulate n_paths paths in seeded chunks, optionally on a thread pool.

    @retval list of ChunkResult in chunk order
    """
    x0 = model.domain.require(as_vector(x0, "x0", dimension=model.dimension), "x0")
    steps, dt = time_grid(T, dt)
    if antithetic and chunk_size % 2:
        chunk_size += 1
    sizes = chunk_sizes(int(n_paths), int(chunk_size))
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(index):
        return simulate_chunk(
            model, x0, steps, dt, sizes[index], seeds[index], short_rate, antithetic
        )

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run, range(len(sizes))))
    else:
        results = [run(index) for index in range(len(sizes))]
    flagged = sum(int(result.flagged.sum()) for result in results)
    if flagged:
        logger.warning("%d of %d paths left the domain box", flagged, n_paths)
    return results


def simulate_state(model, x0, T, dt, seed):
    """Simulate a single path of the state SDE.

    @param  model:  JumpDiffusionModel.
    @param  x0:     Initial state inside the domain box.
    @param  T:      Horizon (>= dt).
    @param  dt:     Step size (> 0).
    @param  seed:   Integer seed; identical seeds give identical paths.
    @throw  StepSizeError: If λ(x)·dt > 1.
    @retval SimPath
    """
    x0 = model.domain.require(as_vector(x0, "x0", dimension=model.dimension), "x0")
    steps, dt = time_grid(T, dt)
    result = simulate_chunk(
        model, x0, steps, dt, 1, np.random.SeedSequence(seed), record=True
    )
    times = np.arange(steps + 1) * dt
    marks = np.array([mark for _, mark in result.jump_events]).reshape(-1, model.dimension)
    if result.flagged[0]:
        logger.warning("simulated path left the domain box")
    return SimPath(
        times=times,
        states=np.vstack([state[0] for state in result.states]),
        jump_times=np.array([time for time, _ in result.jump_events]),
        jump_marks=marks,
        seed=seed,
        flagged=bool(result.flagged[0]),
    )


def jump_counts(model, x0, T, dt, n_paths, seed, chunk_size=DEFAULT_CHUNK_SIZE, workers=None):
    """Return the number of jumps on [0, T] of each of n_paths paths."""
    results = run_chunks(model, x0, T, dt, n_paths, seed, chunk_size=chunk_size, workers=workers)
    return np.concatenate([result.jump_counts for result in results])
