"""Consistency residual of the Nelson-Siegel family and the impossibility scan.

No jump-diffusion with a non-vanishing diffusion matrix, or with jumps that
actually move the state, is consistent with the Nelson-Siegel family. The scan
evaluates the residual of a model on a grid and reports whether the verdict
agrees with that statement.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import final

import numpy as np

from core.coefficients import AffineCoefficient, CallableCoefficient
from core.domain import DomainBox
from core.errors import (
    AccuracyError,
    DivergentIntegralError,
    InvalidInputError,
    RegularityError,
)
from core.measures import DEFAULT_TOL, DiracZero, expect
from core.model import JumpDiffusionModel
from core.output import write_csv, write_json
from nelson_siegel.coefficients import discrepancy_table, fitted_drift, ns_direct_lhs
from nelson_siegel.family import NS_DIMENSION, NS_DOMAIN, ns_G, ns_log_f, ns_state

logger = logging.getLogger(__name__)

NS_TAU_GRID = (0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0)
NS_PROBE_BOX = DomainBox(
    np.array([0.0, -0.05, -0.05, 0.1]), np.array([0.1, 0.05, 0.05, 3.0])
)
NS_POINT_COUNT = 16
DEFAULT_VERDICT_TOL = 1e-6
TRIVIAL_DIFFUSION = 1e-14


def _require_nonnegative_decay_jumps(jumps):
    lower, _ = jumps.support_bounds()
    if lower[3] < 0.0:
        raise InvalidInputError(
            "the jump measure should be supported on {xi4 >= 0} for the Nelson-Siegel family"
        )


def ns_jump_integral(jumps, x, tau, tol=DEFAULT_TOL):
    """Return ∫ δ₀ dQ with δ₀ = [G(τ, x+ξ) - G(τ, x)]·exp(log f)."""
    if jumps.is_dirac_zero:
        return 0.0
    _require_nonnegative_decay_jumps(jumps)
    base = ns_G(x, tau)

    def delta(xi):
        increment = ns_G(x + xi, tau) - base
        return 0.0 if increment == 0.0 else increment * math.exp(ns_log_f(x, xi, tau))

    try:
        return expect(jumps, delta, tol)
    except (DivergentIntegralError, AccuracyError, OverflowError) as e:
        raise RegularityError(f"jump integral diverges at tau={tau}, x={x.tolist()}: {e}") from e


def ns_consistency_residual(x, model, tau, tol=DEFAULT_TOL):
    """Return q(τ, x) - λ(x)∫δ₀dQ for a model over R³ × (0, ∞).

    @throw  InvalidInputError:  If Q charges {ξ₄ < 0}.
    @throw  RegularityError:    If the jump integral diverges.
    """
    x = ns_state(x)
    if model.dimension != NS_DIMENSION:
        raise InvalidInputError(f"a Nelson-Siegel model has dimension 4, got {model.dimension}")
    if model.has_jumps:
        _require_nonnegative_decay_jumps(model.jumps)
    lhs = ns_direct_lhs(x, model.a(x), model.b(x), tau)
    intensity = float(model.intensity(x))
    if intensity == 0.0 or not model.has_jumps:
        return lhs
    return lhs - intensity * ns_jump_integral(model.jumps, x, tau, tol)


def ns_regularity_check(jumps, probes, tol=DEFAULT_TOL):
    """Check ∫ (1 + |ξ₄|³)e^{-r₂ξ₂ - r₃ξ₃} Q(dξ) < ∞ at every probe (r₂, r₃).

    @retval tuple (bool, failing probe or None)
    """
    probes = [tuple(float(r) for r in probe) for probe in probes]
    if not probes:
        raise InvalidInputError("probes should not be empty")
    if jumps.is_dirac_zero:
        return True, None
    cubic = None
    for r2, r3 in probes:
        v = np.array([0.0, r2, r3, 0.0])
        try:
            if hasattr(jumps, "active_coordinates"):
                # independent coordinates: the integral factorizes
                cubic = cubic if cubic is not None else jumps.expect_coordinate(
                    3, lambda s: abs(s) ** 3, tol
                )
                value = jumps.laplace(v) * (1.0 + cubic)
            else:
                value = jumps.expect(
                    lambda xi, v=v: (1.0 + abs(xi[3]) ** 3) * math.exp(-(v @ xi)), tol
                )
        except (DivergentIntegralError, AccuracyError, OverflowError) as e:
            logger.info("regularity fails at probe %s: %s", (r2, r3), e)
            return False, (r2, r3)
        if not math.isfinite(value):
            return False, (r2, r3)
    return True, None


@final
@dataclass(frozen=True)
class ScanReport:
    """Outcome of the impossibility scan.

    @property nodes:            (τ, x) pairs.
    @property residuals:        Residual per node.
    @property max_residual:     Largest absolute residual.
    @property is_trivial_model: a ≡ 0 on the grid and (λ ≡ 0 or Q = δ₀).
    @property verdict:          "consistent" or "inconsistent".
    """

    nodes: list
    residuals: np.ndarray
    max_residual: float
    is_trivial_model: bool
    verdict: str
    tolerance: float
    discrepancies: list = field(default_factory=list)

    @property
    def consistent(self):
        return self.verdict == "consistent"

    @property
    def only_trivial_consistent(self):
        """Consistency only for the trivial (deterministic) models."""
        return not self.consistent or self.is_trivial_model

    def summary(self):
        return {
            "verdict": self.verdict,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "is_trivial_model": self.is_trivial_model,
            "only_trivial_consistent": self.only_trivial_consistent,
            "nodes": len(self.nodes),
            "discrepancies": self.discrepancies,
        }

    def to_json(self, path):
        write_json(path, self.summary())

    def to_csv(self, path):
        header = ["tau", "x1", "x2", "x3", "x4", "residual"]
        write_csv(
            path,
            header,
            ([tau, *x.tolist(), residual] for (tau, x), residual in zip(self.nodes, self.residuals)),
        )

    def discrepancies_to_csv(self, path):
        write_csv(
            path,
            ["coefficient", "max_abs_difference", "agree"],
            ([row["coefficient"], row["max_abs_difference"], row["agree"]] for row in self.discrepancies),
        )


def is_trivial_model(model, x_grid):
    """True if a ≡ 0 on the grid and the jump part is inert there."""
    for x in x_grid:
        if np.abs(model.a(x)).max() > TRIVIAL_DIFFUSION:
            return False
        if model.has_jumps and float(model.intensity(x)) != 0.0:
            return False
    return True


def ns_impossibility_scan(
    model, x_grid=None, tau_grid=NS_TAU_GRID, tol=DEFAULT_VERDICT_TOL,
    quad_tol=DEFAULT_TOL, workers=None, discrepancy_probes=20,
):
    """Scan the Nelson-Siegel residual of a model over a (τ, x) grid.

    @param  model:      JumpDiffusionModel over R⁴ with x₄ > 0 on its domain.
    @param  x_grid:     (optional) States; 16 Halton points of a realistic box by default.
    @param  tau_grid:   Maturities.
    @param  tol:        Verdict tolerance on the largest absolute residual.
    @param  workers:    (optional) Thread count; results do not depend on it.
    @param  discrepancy_probes: Probes of the coefficient comparison (0 to skip).
    @retval ScanReport
    """
    if model.dimension != NS_DIMENSION:
        raise InvalidInputError(f"a Nelson-Siegel model has dimension 4, got {model.dimension}")
    if not model.domain.lower[3] >= 0.0:
        raise InvalidInputError("the model domain should keep the decay rate x4 > 0")
    if x_grid is None:
        x_grid = NS_PROBE_BOX.probe_points(NS_POINT_COUNT)
    x_grid = [ns_state(x) for x in x_grid]
    nodes = [(float(tau), x) for x in x_grid for tau in tau_grid]

    def evaluate(node):
        tau, x = node
        return ns_consistency_residual(x, model, tau, quad_tol)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            residuals = np.array(list(executor.map(evaluate, nodes)))
    else:
        residuals = np.array([evaluate(node) for node in nodes])
    max_residual = float(np.max(np.abs(residuals)))
    trivial = is_trivial_model(model, x_grid)
    verdict = "consistent" if max_residual < tol else "inconsistent"
    report = ScanReport(
        nodes=nodes,
        residuals=residuals,
        max_residual=max_residual,
        is_trivial_model=trivial,
        verdict=verdict,
        tolerance=tol,
        discrepancies=discrepancy_table(discrepancy_probes) if discrepancy_probes else [],
    )
    if not report.only_trivial_consistent:
        logger.warning("a non-trivial model scanned consistent (max residual %.3e)", max_residual)
    logger.info("scan verdict %s, max residual %.3e", verdict, max_residual)
    return report


def ns_trivial_model(intensity=0.0, jumps=None):
    """Return the deterministic model a = 0 with the fitted drift (optionally with inert jumps)."""
    return JumpDiffusionModel(
        domain=NS_DOMAIN,
        drift=CallableCoefficient(fitted_drift, NS_DIMENSION, (NS_DIMENSION,), name="fitted_drift"),
        intensity=AffineCoefficient.constant_value(intensity, NS_DIMENSION),
        jumps=jumps or DiracZero(NS_DIMENSION),
        diffusion=AffineCoefficient.constant_value(np.zeros((4, 4)), NS_DIMENSION),
        name="ns-trivial",
    )
