"""Command-line front end of the term-structure consistency toolkit.

Every command reads a run configuration (config.yml by default), writes tidy CSV
and a JSON summary into the output directory and exits with

    0 ok, 1 other error, 2 invalid input, 3 numeric blow-up, 4 inconsistent,
    5 jump regularity violated, 6 rank-deficient recovery.

Errors are reported as one JSON line on the error stream.
"""
import json
import logging
import math
import os
import sys
from argparse import ArgumentParser

import numpy as np

from core.errors import (
    AccuracyError,
    DivergentIntegralError,
    ExplosionError,
    InvalidInputError,
    RegularityError,
    TermStructureError,
)
from core.output import to_builtin, write_csv, write_json
from consistency.recovery import recover_coefficients
from consistency.regularity import regularity_check
from consistency.report import DEFAULT_VERDICT_TOL, residual_report
from databases.mongodb.helpers import make_run_id
from factory import COMMANDS, DEFAULT_TAU_MAX, ArchiveFactory, ModelFactory
from nelson_siegel.scan import (
    NS_POINT_COUNT,
    NS_PROBE_BOX,
    ns_impossibility_scan,
    ns_regularity_check,
)
from riccati.path import write_yield_curve, yield_curve
from simulate.hjm import HJMInputs, hjm_drift
from simulate.paths import DEFAULT_CHUNK_SIZE, simulate_state
from simulate.pricing import SEED_RETRIES, martingale_test, mc_bond_price, retry_seeds

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_SPEC = 2
EXIT_BLOW_UP = 3
EXIT_INCONSISTENT = 4
EXIT_REGULARITY = 5
EXIT_RANK_DEFICIENT = 6

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

DEFAULT_HORIZON = 1.0
DEFAULT_MATURITY = 5.0
DEFAULT_DT = 1e-3
DEFAULT_PATHS = 100_000
DEFAULT_QUAD_TOL = 1e-10


def exit_code_for(error):
    """Map an exception to the cli exit code."""
    if isinstance(error, RegularityError):
        return EXIT_REGULARITY
    if isinstance(error, (ExplosionError, DivergentIntegralError, AccuracyError, OverflowError)):
        return EXIT_BLOW_UP
    if isinstance(error, (ValueError, TypeError, KeyError, OSError)):
        return EXIT_SPEC
    return EXIT_OTHER


def error_line(error, exit_code):
    """Return the single-line JSON diagnostic of an error."""
    diagnostic = {"error": type(error).__name__, "message": str(error), "exit_code": exit_code}
    if isinstance(error, ExplosionError):
        diagnostic["tau"] = error.tau
    if isinstance(error, DivergentIntegralError) and error.coordinate is not None:
        diagnostic["coordinate"] = error.coordinate
    return json.dumps(diagnostic, sort_keys=True)


class Run:
    """One cli invocation: the resolved configuration plus the objects built from it."""

    def __init__(self, config, factory, tol, workers):
        self.config = config
        self.factory = factory
        self.tol = tol
        self.workers = workers
        self.quad_tol = float(config.control("quad_tol", DEFAULT_QUAD_TOL))
        self.model = factory.construct_model(config.model)

    def path(self, name):
        os.makedirs(self.config.output_dir, exist_ok=True)
        return os.path.join(self.config.output_dir, name)

    def tau_max(self, *extra):
        return max(
            float(self.config.control("tau_max", DEFAULT_TAU_MAX)), *self.config.tau_grid, *extra
        )

    def family(self, *extra):
        """Build the configured family; a family may name its own generating model."""
        spec = dict(self.config.family)
        generator = self.model
        if spec.get("model") is not None:
            generator = self.factory.construct_model(spec.pop("model"))
        return self.factory.construct_family(
            spec,
            generator,
            tau_max=self.tau_max(*extra),
            rel_tol=float(self.config.control("rel_tol", 1e-10)),
            abs_tol=float(self.config.control("abs_tol", 1e-12)),
        )

    def x_points(self):
        if self.config.x_points is not None:
            return [np.array(point) for point in self.config.x_points]
        return list(
            self.model.domain.probe_points(self.config.x_count, seed=self.config.seed or 0)
        )


def cmd_price(run):
    """Solve the Riccati equations, write the H path and the yield curve at x0."""
    if run.config.family.get("type", "affine") not in ("affine", "separable"):
        raise InvalidInputError("price needs an affine or separable family")
    family = run.family()
    path = family.maturity
    curve = yield_curve(path, run.config.x0, (0.0, *run.config.tau_grid), family.basis)
    path.to_csv(run.path("hpath.csv"))
    write_yield_curve(run.path("yield_curve.csv"), curve)
    summary = {
        "tau_max": path.tau_max,
        "x0": list(run.config.x0),
        "diagnostics": path.diagnostics,
        "yields": [{"tau": tau, "price": price, "yield": rate} for tau, price, rate in curve],
    }
    return EXIT_OK, "ok", summary


def _check_regularity(run, family, x_points, tau_max):
    if not run.model.has_jumps:
        return
    for x in x_points:
        result = regularity_check(family, run.model.jumps, x, tau_max, run.quad_tol)
        if not result:
            raise RegularityError(
                f"jump regularity fails at x={x.tolist()} (tau={result.failing_tau}): {result.reason}"
            )


def cmd_check(run):
    """Evaluate the consistency residual on the (τ, x) grid."""
    family = run.family()
    x_points = run.x_points()
    _check_regularity(run, family, x_points, max(run.config.tau_grid))
    report = residual_report(
        run.model,
        family,
        run.config.tau_grid,
        x_points,
        tol=run.quad_tol,
        workers=run.workers,
        seed=run.config.seed or 0,
    )
    report.to_csv(run.path("residuals.csv"))
    summary = report.summary(run.tol)
    verdict = summary["verdict"]
    return (EXIT_OK if verdict == "consistent" else EXIT_INCONSISTENT), verdict, summary


def cmd_recover(run):
    """Recover (a, b, λ) from the family at every configured state."""
    family = run.family()
    jumps_spec = run.config.numeric.get("recover_jumps")
    jumps = run.model.jumps if jumps_spec is None else run.factory.construct_measure(jumps_spec)
    x_points = (
        [np.array(point) for point in run.config.x_points]
        if run.config.x_points is not None
        else [np.array(run.config.x0)]
    )
    recovered = [
        recover_coefficients(family, jumps, x, run.config.tau_grid, run.quad_tol) for x in x_points
    ]
    n = run.model.dimension
    header = ["x" + str(i + 1) for i in range(n)]
    header += ["b" + str(i + 1) for i in range(n)]
    header += [f"a{i + 1}{j + 1}" for i in range(n) for j in range(i, n)]
    header += ["intensity", "residual_norm", "condition_number", "rank_deficient"]
    rows = []
    for x, result in zip(x_points, recovered):
        upper = [result.a[i, j] for i in range(n) for j in range(i, n)]
        rows.append(
            [*x.tolist(), *result.b.tolist(), *upper, result.intensity,
             result.residual_norm, result.condition_number, result.rank_deficient]
        )
    write_csv(run.path("recovered.csv"), header, rows)
    deficient = any(result.rank_deficient for result in recovered)
    summary = {
        "points": [
            {"x": x.tolist(), **result.to_dict()} for x, result in zip(x_points, recovered)
        ],
        "rank_deficient": deficient,
    }
    if deficient:
        return EXIT_RANK_DEFICIENT, "rank-deficient", summary
    return EXIT_OK, "ok", summary


def cmd_ns_demo(run):
    """Scan the Nelson-Siegel consistency residual of the configured model."""
    x_grid = None if run.config.x_points is None else [np.array(x) for x in run.config.x_points]
    if run.model.has_jumps:
        # sup over τ of ∫₀^τ e^{-x₄u}du and ∫₀^τ u e^{-x₄u}du
        states = x_grid if x_grid is not None else NS_PROBE_BOX.probe_points(NS_POINT_COUNT)
        probes = [(1.0 / x[3], 1.0 / x[3] ** 2) for x in states]
        regular, failing = ns_regularity_check(run.model.jumps, probes, run.quad_tol)
        if not regular:
            raise RegularityError(f"jump regularity fails for the Nelson-Siegel family at x={failing}")
    report = ns_impossibility_scan(
        run.model,
        x_grid,
        run.config.tau_grid,
        tol=run.tol,
        quad_tol=run.quad_tol,
        workers=run.workers,
        discrepancy_probes=int(run.config.control("discrepancy_probes", 20)),
    )
    report.to_csv(run.path("ns_residuals.csv"))
    report.discrepancies_to_csv(run.path("ns_discrepancies.csv"))
    summary = report.summary()
    return (EXIT_OK if report.consistent else EXIT_INCONSISTENT), report.verdict, summary


def cmd_simulate(run):
    """Simulate one state path; with n_paths set also estimate P(0, T) by Monte Carlo."""
    horizon = float(run.config.control("T", DEFAULT_HORIZON))
    dt = float(run.config.control("dt", DEFAULT_DT))
    sim_path = simulate_state(run.model, run.config.x0, horizon, dt, run.config.seed)
    sim_path.to_csv(run.path("path.csv"))
    summary = {
        "T": horizon,
        "dt": dt,
        "seed": run.config.seed,
        "final_state": sim_path.final_state.tolist(),
        "jumps": int(sim_path.jump_times.size),
        "flagged": sim_path.flagged,
    }
    if run.config.numeric.get("n_paths") is not None:
        family = run.family(horizon)
        estimate = mc_bond_price(
            run.model, family, run.config.x0, horizon, dt,
            int(run.config.numeric["n_paths"]), run.config.seed,
            antithetic=bool(run.config.control("antithetic", False)),
            chunk_size=int(run.config.control("chunk_size", DEFAULT_CHUNK_SIZE)),
            workers=run.workers,
        )
        summary["bond_price"] = estimate.to_dict()
        summary["family_bond_price"] = family.bond_price(horizon, np.array(run.config.x0))
    return EXIT_OK, "ok", summary


def cmd_martingale(run):
    """Monte Carlo test that the discounted bond price is a martingale."""
    t = float(run.config.control("t", DEFAULT_HORIZON))
    maturity = float(run.config.control("T", DEFAULT_MATURITY))
    family = run.family(maturity)
    threshold = float(run.config.control("z_threshold", 3.0))

    def attempt(seed):
        return martingale_test(
            run.model, family, run.config.x0, t, maturity,
            float(run.config.control("dt", DEFAULT_DT)),
            int(run.config.control("n_paths", DEFAULT_PATHS)),
            seed,
            antithetic=bool(run.config.control("antithetic", False)),
            chunk_size=int(run.config.control("chunk_size", DEFAULT_CHUNK_SIZE)),
            workers=run.workers,
        )

    report, tried = retry_seeds(
        attempt, run.config.seed, lambda result: result.passed(threshold),
        int(run.config.control("seed_retries", SEED_RETRIES)),
    )
    summary = {
        "t": t, "T": maturity, "threshold": threshold, "seeds_tried": tried, **report.to_dict()
    }
    if report.passed(threshold):
        return EXIT_OK, "martingale", summary
    return EXIT_INCONSISTENT, "not-martingale", summary


def cmd_hjm_drift(run):
    """Evaluate the HJM drift of a constant-σ / constant-ρ forward rate on the τ grid."""
    spec = run.config.hjm
    marks = run.factory.construct_measure(spec.get("marks", {"type": "dirac_zero", "dimension": 1}))
    inputs = HJMInputs.constant(
        float(spec.get("sigma", 0.0)), float(spec.get("loading", 0.0)),
        float(spec.get("rate", 0.0)), marks,
    )
    t = float(run.config.control("t", 0.0))
    rows = [[t, t + tau, hjm_drift(inputs, t, t + tau, run.quad_tol)] for tau in run.config.tau_grid]
    write_csv(run.path("hjm_drift.csv"), ["t", "T", "drift"], rows)
    summary = {"t": t, "drifts": [{"T": T, "drift": drift} for _, T, drift in rows]}
    return EXIT_OK, "ok", summary


HANDLERS = {
    "price": cmd_price,
    "check": cmd_check,
    "recover": cmd_recover,
    "ns-demo": cmd_ns_demo,
    "simulate": cmd_simulate,
    "martingale": cmd_martingale,
    "hjm-drift": cmd_hjm_drift,
}


def build_parser():
    parser = ArgumentParser(description="Consistency checks for jump-diffusion term-structure models")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="run configuration (.yml, .yaml or .json)", default=None)
    parser.add_argument("--out", help="output directory", default=None)
    parser.add_argument("--seed", help="seed of stochastic commands", type=int, default=None)
    parser.add_argument("--tol", help="verdict tolerance", type=float, default=DEFAULT_VERDICT_TOL)
    parser.add_argument("--quiet", help="only log warnings and errors", action="store_true")
    parser.add_argument("--preset", help="named model preset overriding the config", default=None)
    parser.add_argument("--log-file", help="also write the log to this file", default=None)
    parser.add_argument("--archive", help="archive configuration; stores the run summary", default=None)
    parser.add_argument("--workers", help="threads for grid and path evaluation", type=int, default=None)
    return parser


def configure_logging(quiet=False, log_file=None):
    fmt = logging.Formatter(LOG_FORMAT)
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(fmt)
    root.addHandler(stream)
    if log_file:
        file_handler = logging.FileHandler(filename=log_file, mode="a", encoding="utf-8")
        file_handler.setFormatter(fmt)
        root.addHandler(file_handler)
    root.setLevel(logging.WARNING if quiet else logging.INFO)


def archive_run(path, config, exit_code, verdict, summary):
    """Store the run summary; archive failures are logged and do not change the exit code."""
    run_id = make_run_id(config.command, config.to_dict(), config.seed)
    try:
        archive = ArchiveFactory().construct_archive(path)
        archive.add_run(run_id, config.command, verdict, exit_code, summary=to_builtin(summary))
    except Exception as e:  # pylint: disable=broad-except
        logger.error("could not archive run %s: %s", run_id, e)
    return run_id


def main(argv=None):
    """Run one command and return its exit code."""
    options = build_parser().parse_args(argv)
    configure_logging(options.quiet, options.log_file)
    try:
        if not (options.tol > 0.0 and math.isfinite(options.tol)):
            raise InvalidInputError(f"--tol should be a positive number, got {options.tol}")
        config = ModelFactory().construct_run_config(
            options.config, options.command, options.preset, options.seed, options.out
        )
        run = Run(config, ModelFactory(), options.tol, options.workers)
        exit_code, verdict, summary = HANDLERS[config.command](run)
        summary = {"command": config.command, "verdict": verdict, "exit_code": exit_code, **summary}
        write_json(run.path(config.command + ".json"), summary)
    except (TermStructureError, ValueError, TypeError, KeyError, OSError, ArithmeticError) as e:
        exit_code = exit_code_for(e)
        logger.debug("command failed", exc_info=True)
        print(error_line(e, exit_code), file=sys.stderr)
        return exit_code
    logger.info("%s finished: %s (exit code %d)", config.command, verdict, exit_code)
    if options.archive:
        archive_run(options.archive, config, exit_code, verdict, summary)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
