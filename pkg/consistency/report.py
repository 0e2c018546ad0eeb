"""Grid evaluation of the consistency residual."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import final

import numpy as np

from consistency.residual import TERM_NAMES, consistency_residual
from core.errors import InvalidInputError, TermStructureError
from core.helpers import as_grid
from core.measures import DEFAULT_TOL
from core.output import write_csv, write_json

logger = logging.getLogger(__name__)

DEFAULT_TAU_GRID = (0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0)
DEFAULT_POINT_COUNT = 16
DEFAULT_VERDICT_TOL = 1e-6


@final
@dataclass(frozen=True)
class ResidualReport:
    """Residual of a (model, family) pair on a grid of (τ, x) nodes.

    @property nodes:    List of (τ, x) pairs in evaluation order.
    @property residuals: Residual per node (NaN for failed nodes).
    @property terms:    Array (nodes, 5) of drift, diff, cross, jump and dtau terms.
    @property failures: List of (node index, error class, message).
    """

    nodes: list
    residuals: np.ndarray
    terms: np.ndarray
    failures: list = field(default_factory=list)

    @property
    def max_abs(self):
        finite = self.residuals[np.isfinite(self.residuals)]
        return float(np.max(np.abs(finite))) if finite.size else math.nan

    @property
    def rms(self):
        finite = self.residuals[np.isfinite(self.residuals)]
        return math.sqrt(math.fsum(finite**2) / finite.size) if finite.size else math.nan

    def is_consistent(self, tol=DEFAULT_VERDICT_TOL):
        return not self.failures and self.max_abs < tol

    def rows(self):
        for (tau, x), residual, terms in zip(self.nodes, self.residuals, self.terms):
            yield [tau, *x.tolist(), residual, *terms.tolist()]

    def to_csv(self, path):
        dimension = self.nodes[0][1].size if self.nodes else 0
        header = ["tau", *(f"x{i + 1}" for i in range(dimension)), "residual"]
        header += [f"term_{name}" for name in TERM_NAMES]
        write_csv(path, header, self.rows())

    def summary(self, tol=DEFAULT_VERDICT_TOL):
        return {
            "verdict": "consistent" if self.is_consistent(tol) else "inconsistent",
            "tolerance": tol,
            "max_abs": self.max_abs,
            "rms": self.rms,
            "nodes": len(self.nodes),
            "failures": [
                {"node": index, "error": error, "message": message}
                for index, error, message in self.failures
            ],
        }

    def to_json(self, path, tol=DEFAULT_VERDICT_TOL):
        write_json(path, self.summary(tol))


def residual_report(
    model, family, tau_grid=DEFAULT_TAU_GRID, x_points=None, tol=DEFAULT_TOL,
    strict=True, workers=None, seed=0,
):
    """Evaluate consistency_residual on every (τ, x) node of a grid.

    @param  model:      JumpDiffusionModel.
    @param  family:     ForwardCurveFamily.
    @param  tau_grid:   Maturities (>= 0).
    @param  x_points:   (optional) States; defaults to 16 scrambled Halton points
                        of the model's domain box.
    @param  tol:        Jump quadrature tolerance.
    @param  strict:     Re-raise the first node error (after logging every failing
                        node); otherwise record failures in the report.
    @param  workers:    (optional) Number of threads; results do not depend on it.
    @throw  InvalidInputError: If a grid is empty.
    @retval ResidualReport
    """
    taus = as_grid(tau_grid, "tau_grid")
    if x_points is None:
        x_points = model.domain.probe_points(DEFAULT_POINT_COUNT, seed=seed)
    x_points = [np.asarray(x, dtype=float) for x in x_points]
    if not x_points:
        raise InvalidInputError("x_points should not be empty")
    nodes = [(float(tau), x) for x in x_points for tau in taus]

    def evaluate(node):
        tau, x = node
        try:
            return consistency_residual(model, family, x, tau, tol), None
        except TermStructureError as e:
            return None, e

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(evaluate, nodes))
    else:
        outcomes = [evaluate(node) for node in nodes]

    residuals = np.full(len(nodes), math.nan)
    terms = np.full((len(nodes), len(TERM_NAMES)), math.nan)
    failures = []
    first_error = None
    for index, (result, error) in enumerate(outcomes):
        if error is not None:
            tau, x = nodes[index]
            logger.warning("residual failed at tau=%g x=%s: %s", tau, x.tolist(), error)
            failures.append((index, type(error).__name__, str(error)))
            first_error = first_error or error
            continue
        residuals[index] = result.residual
        terms[index] = result.as_tuple()
    if strict and first_error is not None:
        raise first_error
    report = ResidualReport(nodes, residuals, terms, failures)
    logger.info(
        "residual report: %d nodes, max_abs=%.3e, rms=%.3e", len(nodes), report.max_abs, report.rms
    )
    return report
