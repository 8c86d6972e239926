"""JSON experiment configuration.

Every key is optional (defaults reproduce the common simulation setup);
unknown keys are rejected. Errors carry the offending field and, when it
can be located, the line of the file it appears on.
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .array_model import ArrayGeometry
from .beamform import METHODS, MethodSettings
from .errors import DomainError
from .sector import DEFAULT_NUM_BASIS, DEFAULT_STEP
from .sim import CoherentScattering, Exact, Interferer, PhaseDistortion, Scenario
from .svest import DEFAULT_TOL, NULL_TOL

DEFAULT_METHODS = ["proposed", "mv_smi", "worst_case", "eigenspace", "subspace"]


class ConfigError(ValueError):
    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


@dataclass
class ExperimentConfig:
    num_elements: int = 10
    spacing_wavelengths: float = 0.5
    presumed_doa: float = 3.0
    snr_db: float = 20.0
    interferers: List[dict] = field(default_factory=lambda: [{"doa": 30.0, "inr_db": 30.0},
                                                             {"doa": 50.0, "inr_db": 30.0}])
    num_snapshots: int = 30
    mismatch: dict = field(default_factory=lambda: {"type": "exact"})
    sector_halfwidth: float = 5.0
    num_basis: int = DEFAULT_NUM_BASIS
    epsilon: Optional[float] = None
    subspace_dim: Optional[int] = None
    quadrature_step: float = DEFAULT_STEP
    solver_tol: float = DEFAULT_TOL
    null_tol: float = NULL_TOL
    delta0: Optional[float] = None
    diagonal_loading: float = 0.0
    seed: int = 0
    runs: int = 100
    methods: List[str] = field(default_factory=lambda: list(DEFAULT_METHODS))
    snapshot_grid: List[int] = field(default_factory=lambda: list(range(10, 101, 10)))
    snr_grid: List[float] = field(default_factory=lambda: [float(s) for s in range(-10, 31, 5)])

    def scenario(self):
        mm = dict(self.mismatch)
        kind = mm.pop("type", "exact")
        if kind == "exact":
            model = Exact()
        elif kind == "phase":
            model = PhaseDistortion(**mm)
        elif kind == "scatter":
            model = CoherentScattering(**mm)
        else:
            raise DomainError(f"unknown mismatch type {kind!r}")
        return Scenario(
            geometry=ArrayGeometry(self.num_elements, self.spacing_wavelengths),
            presumed_doa=self.presumed_doa,
            snr_db=self.snr_db,
            interferers=tuple(Interferer(float(i["doa"]), float(i["inr_db"])) for i in self.interferers),
            num_snapshots=self.num_snapshots,
            mismatch=model,
            sector_halfwidth=self.sector_halfwidth,
            seed=self.seed,
        )

    def settings(self):
        return MethodSettings(self.epsilon, self.subspace_dim, self.solver_tol)


_TYPES = {
    "num_elements": int, "spacing_wavelengths": float, "presumed_doa": float, "snr_db": float,
    "interferers": list, "num_snapshots": int, "mismatch": dict, "sector_halfwidth": float,
    "num_basis": int, "epsilon": (float, type(None)), "subspace_dim": (int, type(None)),
    "quadrature_step": float, "solver_tol": float, "null_tol": float, "delta0": (float, type(None)),
    "diagonal_loading": float, "seed": int, "runs": int, "methods": list, "snapshot_grid": list,
    "snr_grid": list,
}
_MISMATCH_KEYS = {
    "exact": set(),
    "phase": {"variance"},
    "scatter": {"num_paths", "angle_mean", "angle_std", "angle_distribution"},
}


def _line_of(text, key):
    if text is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _coerce(key, value, expected, text):
    def bad():
        raise ConfigError(f"expected {getattr(expected, '__name__', expected)}, got {value!r}",
                          key, _line_of(text, key))

    types = expected if isinstance(expected, tuple) else (expected,)
    if value is None:
        if type(None) in types:
            return None
        bad()
    if isinstance(value, bool):
        bad()
    if float in types and isinstance(value, (int, float)):
        return float(value)
    if int in types:
        if isinstance(value, int) or (isinstance(value, float) and value.is_integer()):
            return int(value)
        bad()
    if isinstance(value, types):
        return value
    bad()


def parse_config(data, text=None):
    """Validate a decoded JSON object and build an :class:`ExperimentConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", line=1)
    kwargs = {}
    for key, value in data.items():
        if key not in _TYPES:
            raise ConfigError("unknown field", key, _line_of(text, key))
        kwargs[key] = _coerce(key, value, _TYPES[key], text)

    mm = kwargs.get("mismatch")
    if mm is not None:
        kind = mm.get("type", "exact")
        if kind not in _MISMATCH_KEYS:
            raise ConfigError(f"mismatch type must be one of {sorted(_MISMATCH_KEYS)}", "mismatch.type",
                              _line_of(text, "type"))
        extra = set(mm) - _MISMATCH_KEYS[kind] - {"type"}
        if extra:
            k = sorted(extra)[0]
            raise ConfigError(f"unknown field for mismatch type {kind!r}", f"mismatch.{k}", _line_of(text, k))
    for i, itf in enumerate(kwargs.get("interferers", [])):
        if not isinstance(itf, dict) or set(itf) != {"doa", "inr_db"}:
            raise ConfigError("each interferer needs exactly 'doa' and 'inr_db'", f"interferers[{i}]",
                              _line_of(text, "interferers"))
    for m in kwargs.get("methods", []):
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {', '.join(METHODS)}", "methods",
                              _line_of(text, "methods"))

    cfg = ExperimentConfig(**kwargs)
    if cfg.runs < 1:
        raise ConfigError("must be >= 1", "runs", _line_of(text, "runs"))
    try:
        cfg.scenario()
    except (DomainError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path):
    """Read and validate a configuration file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc
    return parse_config(data, text)


def bundled_configs():
    """Paths of the example configurations shipped with the package."""
    root = Path(__file__).with_name("configs")
    return sorted(root.glob("*.json"))
