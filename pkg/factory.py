"""This module implements the factory pattern for building models, curve families and run archives from configuration files."""
import copy
import logging
import math
from dataclasses import dataclass, field

## As of Python 3.8 we can do more with typing. It is recommended to make
## the factory classes final. Use the following import and provided
## decorator for the class.
from typing import Optional, final
import yaml

import numpy as np

from databases.mongodb.mongodbadapter import MongoRunArchive
from core.coefficients import AffineCoefficient, CallableCoefficient
from core.domain import DomainBox
from core.measures import DiracZero, Discrete, Empirical, ExponentialProduct, GaussianDiagonal
from core.model import JumpDiffusionModel
from families.numeric import NumericCallableFamily
from nelson_siegel.coefficients import fitted_drift
from nelson_siegel.family import NS_DIMENSION, NS_DOMAIN, NelsonSiegelFamily, ns_G
from riccati.closed_form import vasicek_h
from riccati.gre import build_gre, build_ode_system, solve_gre
from riccati.separable import AffineFamily, SeparableFamily, make_basis

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = "config.yml"
CONFIG_EXTENSIONS = ("yml", "yaml", "json")
COMMANDS = ("price", "check", "recover", "ns-demo", "simulate", "martingale", "hjm-drift")
STOCHASTIC_COMMANDS = ("simulate", "martingale")
DEFAULT_TAU_MAX = 30.0

PRESET_DEFAULTS = {
    "vasicek": {"kappa": 0.5, "mu": 0.04, "sigma": 0.02, "x0": 0.03},
    "cir-like": {"kappa": 0.5, "mu": 0.04, "sigma": 0.1, "x0": 0.03},
    "pure-jump": {"intensity": 0.2, "rate": 50.0, "x0": 0.03},
    "jump-vasicek": {
        "kappa": 0.5, "mu": 0.04, "sigma": 0.02, "intensity": 0.3, "rate": 50.0, "x0": 0.03,
    },
    "flat": {"x0": 0.05},
    "ns-trivial": {"intensity": 0.0, "a11": 0.0, "x0": [0.03, -0.01, 0.01, 0.5]},
}


def read_config_file(path=None):
    """Load a YAML (or JSON) configuration document.

    @param  path:       The path to the configuration file. It could be None, then
                        the default path config.yml is considered.
    @throw  ValueError: If the extension is not .yml, .yaml or .json, or the file
                        does not hold a mapping.
    @throw  OSError:    If the file cannot be read.
    @retval Dict
    """
    path = path or DEFAULT_CONFIG
    extension = path.rsplit(".", 1)[-1].lower() if "." in path else ""
    if extension not in CONFIG_EXTENSIONS:
        raise ValueError(
            f"The file extension of {path} is incorrect. A YAML or JSON file is required."
        )
    with open(path, "r", encoding="utf-8") as config_file:
        config = yaml.safe_load(config_file)
    if not isinstance(config, dict):
        raise ValueError(f"The configuration file {path} does not contain a mapping")
    logger.debug("read configuration %s", path)
    return config


def _require(mapping, key, types, where):
    if not isinstance(mapping, dict):
        raise TypeError(f"{where} should be a mapping, got {type(mapping).__name__}")
    if key not in mapping:
        raise ValueError(f"{where} is missing the key '{key}'")
    return _check_type(mapping[key], types, f"{where}.{key}")


def _optional(mapping, key, types, where, default=None):
    if mapping.get(key) is None:
        return default
    return _check_type(mapping[key], types, f"{where}.{key}")


def _check_type(value, types, where):
    if isinstance(value, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise TypeError(f"{where} should not be a bool")
    if not isinstance(value, types):
        raise TypeError(f"{where} has type {type(value).__name__}")
    return value


def _bounds(values, dimension, fill):
    if values is None:
        return np.full(dimension, fill)
    return np.array([fill if value is None else float(value) for value in values])


def _affine_model(dimension, drift, intensity, jumps, diffusion=None, diffusion_matrix=None, domain=None):
    spec = {
        "dimension": dimension,
        "drift": drift,
        "intensity": intensity,
        "jumps": jumps,
    }
    if diffusion is not None:
        spec["diffusion"] = diffusion
    if diffusion_matrix is not None:
        spec["diffusion_matrix"] = diffusion_matrix
    if domain is not None:
        spec["domain"] = domain
    return spec


def _vasicek_spec(p, intensity=0.0, jumps=None):
    return _affine_model(
        1,
        drift={"constant": [p["kappa"] * p["mu"]], "linear": [[-p["kappa"]]]},
        diffusion={"constant": [[p["sigma"]]]},
        intensity={"constant": intensity},
        jumps=jumps or {"type": "dirac_zero", "dimension": 1},
    )


def expand_preset(name, parameters=None):
    """Expand a named preset into an explicit model specification.

    @param  name:       One of vasicek, cir-like, pure-jump, jump-vasicek, flat, ns-trivial.
    @param  parameters: (optional) Overrides of the preset's parameters.
    @throw  ValueError: If the preset is unknown.
    @retval Tuple (model specification, initial state x0)
    """
    if name not in PRESET_DEFAULTS:
        raise ValueError(f"Unknown preset '{name}'; known presets: {sorted(PRESET_DEFAULTS)}")
    p = dict(PRESET_DEFAULTS[name])
    unknown = set(parameters or {}) - set(p)
    if unknown:
        raise ValueError(f"Unknown parameters {sorted(unknown)} for preset '{name}'")
    p.update(parameters or {})

    if name == "vasicek":
        spec = _vasicek_spec(p)
    elif name == "jump-vasicek":
        spec = _vasicek_spec(
            p, p["intensity"], {"type": "exponential", "rates": [p["rate"]]}
        )
    elif name == "cir-like":
        spec = _affine_model(
            1,
            drift={"constant": [p["kappa"] * p["mu"]], "linear": [[-p["kappa"]]]},
            diffusion_matrix={"constant": [[0.0]], "linear": [[[0.5 * p["sigma"] ** 2]]]},
            intensity={"constant": 0.0},
            jumps={"type": "dirac_zero", "dimension": 1},
            domain={"lower": [0.0], "upper": [None]},
        )
    elif name == "pure-jump":
        spec = _affine_model(
            1,
            drift={"constant": [0.0]},
            diffusion={"constant": [[0.0]]},
            intensity={"constant": p["intensity"]},
            jumps={"type": "exponential", "rates": [p["rate"]]},
        )
    elif name == "flat":
        spec = _affine_model(
            1,
            drift={"constant": [0.0]},
            diffusion={"constant": [[0.0]]},
            intensity={"constant": 0.0},
            jumps={"type": "dirac_zero", "dimension": 1},
        )
    else:
        diffusion_matrix = np.zeros((NS_DIMENSION, NS_DIMENSION))
        diffusion_matrix[0, 0] = p["a11"]
        spec = {
            "dimension": NS_DIMENSION,
            "drift": {"type": "ns-fitted"},
            "diffusion_matrix": {"constant": diffusion_matrix.tolist()},
            "intensity": {"constant": p["intensity"]},
            "jumps": {"type": "dirac_zero", "dimension": NS_DIMENSION},
            "domain": {
                "lower": [None, None, None, 0.0],
                "upper": [None] * NS_DIMENSION,
                "open_lower": [False, False, False, True],
            },
        }
    spec["name"] = name
    return spec, np.atleast_1d(np.asarray(p["x0"], dtype=float)).tolist()


@final
@dataclass(frozen=True)
class RunConfig:
    """Everything one cli command needs.

    @property command:      Command name.
    @property model:        Explicit model specification (presets already expanded).
    @property family:       Family specification.
    @property tau_grid:     Maturities.
    @property x_points:     (optional) States; None means sampled from the domain.
    @property x_count:      Number of sampled states when x_points is None.
    @property x0:           Initial state of stochastic commands.
    @property seed:         (optional) Seed; mandatory for stochastic commands.
    @property numeric:      Numeric controls (tol, quad_tol, rel_tol, abs_tol,
                            tau_max, dt, n_paths, t, T, antithetic, chunk_size).
    @property hjm:          HJM drift inputs.
    @property output_dir:   Directory receiving CSV and JSON outputs.
    """

    command: str
    model: dict
    family: dict
    tau_grid: tuple
    x_points: Optional[tuple]
    x_count: int
    x0: tuple
    seed: Optional[int]
    numeric: dict = field(default_factory=dict)
    hjm: dict = field(default_factory=dict)
    output_dir: str = "out"

    def control(self, name, default):
        """Return a numeric control or its default."""
        value = self.numeric.get(name)
        return default if value is None else value

    def to_dict(self):
        return {
            "command": self.command,
            "model": self.model,
            "family": self.family,
            "tau_grid": list(self.tau_grid),
            "x_points": None if self.x_points is None else [list(x) for x in self.x_points],
            "x_count": self.x_count,
            "x0": list(self.x0),
            "seed": self.seed,
            "numeric": self.numeric,
            "hjm": self.hjm,
        }


@final
class ModelFactory:
    """This class turns configuration dictionaries into models, jump laws and curve families."""

    def __init__(self):
        """Construct."""
        self.__measure_builders = {
            "dirac_zero": self.__dirac_zero,
            "discrete": lambda spec: Discrete(
                _require(spec, "points", list, "jumps"), _require(spec, "weights", list, "jumps")
            ),
            "empirical": lambda spec: Empirical(_require(spec, "samples", list, "jumps")),
            "exponential": self.__exponential,
            "gaussian": lambda spec: GaussianDiagonal(
                _require(spec, "mean", list, "jumps"),
                _require(spec, "stddev", list, "jumps"),
                _optional(spec, "truncate", list, "jumps"),
            ),
        }

    @staticmethod
    def __dirac_zero(spec):
        return DiracZero(int(_require(spec, "dimension", int, "jumps")))

    @staticmethod
    def __exponential(spec):
        rates = [math.inf if rate is None else rate for rate in _require(spec, "rates", list, "jumps")]
        return ExponentialProduct(rates, _optional(spec, "signs", list, "jumps"))

    def construct_measure(self, spec):
        """Return the JumpMeasure described by spec (see JumpMeasure.to_dict).

        @throw  ValueError: If the type is missing or unknown.
        @throw  TypeError:  If a field has the wrong type.
        """
        kind = _require(spec, "type", str, "jumps")
        if kind not in self.__measure_builders:
            raise ValueError(f"Unknown jump measure type '{kind}'")
        return self.__measure_builders[kind](spec)

    @staticmethod
    def construct_coefficient(spec, dimension, output_shape, where):
        """Return an AffineCoefficient from {constant, linear}; linear defaults to zero.

        The fitted Nelson-Siegel drift is available as {"type": "ns-fitted"}.
        """
        kind = _optional(spec, "type", str, where, default="affine")
        if kind == "ns-fitted":
            if dimension != NS_DIMENSION:
                raise ValueError(f"{where}: the fitted Nelson-Siegel drift needs dimension 4")
            return CallableCoefficient(fitted_drift, NS_DIMENSION, (NS_DIMENSION,), name="fitted_drift")
        if kind != "affine":
            raise ValueError(f"{where}: unknown coefficient type '{kind}'")
        constant = np.asarray(_require(spec, "constant", (list, int, float), where), dtype=float)
        if constant.shape != tuple(output_shape):
            raise ValueError(
                f"{where}.constant has shape {constant.shape}, expected {tuple(output_shape)}"
            )
        linear = _optional(spec, "linear", list, where)
        if linear is None:
            linear = np.zeros(tuple(output_shape) + (dimension,))
        return AffineCoefficient(constant, linear)

    @staticmethod
    def construct_domain(spec, dimension):
        if spec is None:
            return DomainBox.unbounded(dimension)
        lower = _optional(spec, "lower", list, "domain")
        upper = _optional(spec, "upper", list, "domain")
        open_lower = _optional(spec, "open_lower", list, "domain", default=())
        return DomainBox(
            _bounds(lower, dimension, -np.inf), _bounds(upper, dimension, np.inf), tuple(open_lower)
        )

    def construct_model(self, spec):
        """Return the JumpDiffusionModel of an explicit specification or a {preset: name} entry.

        @param  spec:       Model specification dictionary.
        @throw  ValueError: If a key is missing or dimensions disagree.
        @throw  TypeError:  If a field has the wrong type.
        @retval JumpDiffusionModel
        """
        if isinstance(spec, dict) and "preset" in spec:
            spec, _ = expand_preset(
                _require(spec, "preset", str, "model"), _optional(spec, "parameters", dict, "model")
            )
        n = _require(spec, "dimension", int, "model")
        if n < 1:
            raise ValueError(f"model.dimension should be >= 1, got {n}")
        diffusion = _optional(spec, "diffusion", dict, "model")
        diffusion_matrix = _optional(spec, "diffusion_matrix", dict, "model")
        if diffusion is None and diffusion_matrix is None:
            raise ValueError("model is missing the key 'diffusion' (or 'diffusion_matrix')")
        return JumpDiffusionModel(
            domain=self.construct_domain(_optional(spec, "domain", dict, "model"), n),
            drift=self.construct_coefficient(_require(spec, "drift", dict, "model"), n, (n,), "model.drift"),
            intensity=self.construct_coefficient(
                _require(spec, "intensity", dict, "model"), n, (), "model.intensity"
            ),
            jumps=self.construct_measure(_require(spec, "jumps", dict, "model")),
            diffusion=None
            if diffusion is None
            else self.construct_coefficient(diffusion, n, (n, n), "model.diffusion"),
            diffusion_matrix=None
            if diffusion_matrix is None
            else self.construct_coefficient(diffusion_matrix, n, (n, n), "model.diffusion_matrix"),
            name=_optional(spec, "name", str, "model", default="model"),
        )

    def construct_family(self, spec, model=None, tau_max=DEFAULT_TAU_MAX, rel_tol=1e-10, abs_tol=1e-12):
        """Return the ForwardCurveFamily described by spec.

        Types: affine (Riccati solution of an affine model), separable (named basis,
        Riccati system built at anchor points), nelson-siegel, numeric (named curve:
        flat, vasicek or nelson-siegel with fixed parameters).

        @param  spec:       Family specification dictionary.
        @param  model:      JumpDiffusionModel; required by affine and separable families.
        @param  tau_max:    Maturity range of Riccati-backed families.
        @throw  ValueError: If the type is unknown or a model is required but missing.
        @throw  ExplosionError: If the Riccati solution blows up before tau_max.
        @retval ForwardCurveFamily
        """
        kind = _require(spec, "type", str, "family")
        if kind in ("affine", "separable") and model is None:
            raise ValueError(f"a {kind} family needs a model")
        theta = _optional(spec, "theta", list, "family")
        if kind == "affine":
            path = solve_gre(build_gre(model, theta), tau_max, rel_tol, abs_tol)
            return AffineFamily(path, model.dimension, model.domain)
        if kind == "separable":
            basis = make_basis(_require(spec, "basis", str, "family"), model.dimension)
            if theta is None:
                theta = np.zeros(basis.size)
                theta[1] = 1.0
            anchors = _optional(spec, "anchors", list, "family")
            system = build_ode_system(basis, model, anchors=anchors, theta=theta)
            path = solve_gre(system, tau_max, rel_tol, abs_tol)
            return SeparableFamily(basis, path, model.domain)
        if kind == "nelson-siegel":
            return NelsonSiegelFamily()
        if kind == "numeric":
            return self.__numeric_family(spec)
        raise ValueError(f"Unknown family type '{kind}'")

    @staticmethod
    def __numeric_family(spec):
        curve = _require(spec, "curve", str, "family")
        p = _optional(spec, "parameters", dict, "family", default={})
        if curve == "flat":
            return NumericCallableFamily(
                lambda tau, x: float(x[0]), DomainBox.unbounded(1), name="flat"
            )
        if curve == "vasicek":
            kappa = float(p.get("kappa", PRESET_DEFAULTS["vasicek"]["kappa"]))
            mu = float(p.get("mu", PRESET_DEFAULTS["vasicek"]["mu"]))
            sigma = float(p.get("sigma", PRESET_DEFAULTS["vasicek"]["sigma"]))
            return NumericCallableFamily(
                lambda tau, x: float(vasicek_h(kappa, mu, sigma, tau) @ np.array([1.0, x[0]])),
                DomainBox.unbounded(1),
                name="vasicek",
            )
        if curve == "nelson-siegel":
            return NumericCallableFamily(lambda tau, x: ns_G(x, tau), NS_DOMAIN, name="nelson-siegel")
        raise ValueError(f"Unknown numeric curve '{curve}'")

    def construct_run_config(self, path=None, command=None, preset=None, seed=None, output_dir=None):
        """Read a run configuration and apply command-line overrides.

        @param  path:       (optional) Configuration file; config.yml by default.
        @param  command:    (optional) Command overriding the file's command.
        @param  preset:     (optional) Preset name overriding the file's model.
        @param  seed:       (optional) Seed overriding the file's seed.
        @param  output_dir: (optional) Output directory.
        @throw  ValueError: If keys are missing, dimensions disagree or a stochastic
                            command has no seed.
        @retval RunConfig
        """
        config = read_config_file(path)
        return self.run_config_from_dict(config, command, preset, seed, output_dir)

    def run_config_from_dict(self, config, command=None, preset=None, seed=None, output_dir=None):
        config = copy.deepcopy(config)
        command = command or _require(config, "command", str, "config")
        if command not in COMMANDS:
            raise ValueError(f"Unknown command '{command}'; known commands: {list(COMMANDS)}")

        model_spec = {"preset": preset} if preset else config.get("model", {"preset": "vasicek"})
        x0 = None
        if "preset" in model_spec:
            model_spec, x0 = expand_preset(
                _require(model_spec, "preset", str, "model"),
                _optional(model_spec, "parameters", dict, "model"),
            )
        dimension = _require(model_spec, "dimension", int, "model")
        if config.get("x0") is not None:
            x0 = np.atleast_1d(np.asarray(config["x0"], dtype=float)).tolist()
        x0 = x0 or [0.0] * dimension
        if len(x0) != dimension:
            raise ValueError(f"x0 has length {len(x0)}, the model has dimension {dimension}")

        grids = _optional(config, "grids", dict, "config", default={})
        tau_grid = tuple(float(tau) for tau in _optional(
            grids, "tau", list, "grids", default=[0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0]
        ))
        x_points = _optional(grids, "x", list, "grids")
        if x_points is not None:
            x_points = tuple(tuple(float(v) for v in np.atleast_1d(point)) for point in x_points)
            if any(len(point) != dimension for point in x_points):
                raise ValueError(f"grids.x points should have dimension {dimension}")

        default_family = {"type": "nelson-siegel"} if command == "ns-demo" else {"type": "affine"}
        seed = seed if seed is not None else _optional(config, "seed", int, "config")
        if command in STOCHASTIC_COMMANDS and seed is None:
            raise ValueError(f"the {command} command needs a seed (--seed or 'seed' in the config)")
        output = _optional(config, "output", dict, "config", default={})
        return RunConfig(
            command=command,
            model=model_spec,
            family=_optional(config, "family", dict, "config", default=default_family),
            tau_grid=tau_grid,
            x_points=x_points,
            x_count=int(_optional(grids, "x_count", int, "grids", default=16)),
            x0=tuple(x0),
            seed=seed,
            numeric=_optional(config, "numeric", dict, "config", default={}),
            hjm=_optional(config, "hjm", dict, "config", default={}),
            output_dir=output_dir or _optional(output, "dir", str, "output", default="out"),
        )


@final
class ArchiveFactory:
    """This class creates an instance of the specified run archive back-end."""

    def __init__(self):
        """Construct."""
        # supported_db_types is the list of different database back-ends which are supported
        self.__supported_db_types = [
            "mongo",
        ]

    def construct_archive(self, path=None):
        """Return an instance of the specified run archive based on a configuration file.

        The file holds db_type and a connection block, either at the top level or
        under an 'archive' key (as in the run configuration config.yml).

        @param  path:                   The path to the configuration file. This field can
                                        be left empty/None, then config.yml is considered.
        @throw  NotImplementedError:    If the specified database is not supported
        @throw  ValueError:             If the configuration is incomplete
        @return                         Instance of the specified run archive
        """
        db_type, connection_dict = self.__read_connection(read_config_file(path))

        if db_type not in self.__supported_db_types:
            raise NotImplementedError(db_type + " database is not supported")

        if db_type == "mongo":
            return MongoRunArchive(connection_dict)
        # FUTURE: Add more storage back-ends here
        raise NotImplementedError(db_type + " database is not supported")

    @staticmethod
    def __read_connection(config):
        config = config.get("archive", config)
        db_type = _require(config, "db_type", str, "archive").lower()
        block = _require(config, db_type, dict, "archive")
        connection_dict = {}
        for key in ("db_name", "user", "password", "host", "port"):
            if key not in block:
                raise ValueError(
                    "Incorrect configuration file, missing some parameters. it should contain: "
                    "db_type, db_name, user, password, host, and port."
                )
            connection_dict[key] = block[key]
        return db_type, connection_dict

