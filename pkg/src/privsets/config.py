"""Flat ``key = value`` experiment configuration.

Example::

    # two factors, 21 runs, spacing 0.05 on the k=1 grid
    d = 2
    N = 21
    delta = 0.05
    grid_k = 1
    privacy = bridge
    criterion = D
    model = quadratic
    constraint = 0.5 -1 <= 0.5
    time_budget = 60

``constraint`` may be repeated, one row of ``A x <= b`` per line. Either
``L`` or ``grid_k`` fixes the grid; with ``grid_k`` the number of levels is
``floor(2 k / delta) + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import List, Optional, Tuple

from .criteria import CriterionSpec, ModelSpec
from .errors import ConfigurationError
from .grid import GridSpace, LinearConstraints, delta_to_steps, levels_for_delta
from .privacy import KINDS, PrivacySpec
from .psa import PsaConfig


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = 2
    N: int = 10
    delta: Optional[float] = None
    L: Optional[int] = None
    grid_k: Optional[int] = None
    privacy: str = "bridge"
    criterion: str = "D"
    model: str = "quadratic"
    ard_z: float = 1.0
    ard_lambda: float = 1.0
    ard_J: Tuple[int, ...] = (1,)
    maxpro_z: float = 2.0
    constraint: Tuple[Tuple[Tuple[float, ...], float], ...] = ()
    blind_samples: int = 64
    candidate_count: int = 50
    tuning_passes: int = 2
    exhaustive_threshold: int = 20_000
    time_budget: Optional[float] = None
    restarts: int = 1
    seed: Optional[int] = None
    out_dir: str = "."
    design_csv: str = "design.csv"
    trace_csv: str = "trace.csv"
    summary: str = "summary.json"
    bench_total: Optional[float] = None
    bench_interval: float = 1.0
    probe_vertices: bool = True
    probe_uniform: int = 10_000
    evaluate: Tuple[str, ...] = ()

    # --- derived objects -------------------------------------------------------

    def levels(self) -> int:
        if self.L is not None:
            return self.L
        if self.grid_k is not None:
            if self.delta is None:
                raise ConfigurationError("delta: grid_k needs delta to derive L")
            return levels_for_delta(self.delta, self.grid_k)
        if self.privacy == "lhd":
            return self.N
        raise ConfigurationError("L: give either L or grid_k")

    def space(self) -> GridSpace:
        cons = None
        if self.constraint:
            for row, _ in self.constraint:
                if len(row) != self.d:
                    raise ConfigurationError(f"constraint: row has {len(row)} coefficients, d={self.d}")
            cons = LinearConstraints([r for r, _ in self.constraint], [b for _, b in self.constraint])
        return GridSpace(self.d, self.levels(), cons)

    def privacy_spec(self, space: GridSpace = None) -> PrivacySpec:
        if self.privacy in ("classical", "lhd"):
            return PrivacySpec(self.privacy)
        if self.delta is None:
            raise ConfigurationError(f"delta: required for {self.privacy} privacy sets")
        return PrivacySpec(self.privacy, delta_to_steps(space or self.space(), self.delta))

    def model_spec(self) -> ModelSpec:
        return parse_model(self.model, self.d)

    def criterion_spec(self) -> CriterionSpec:
        if self.criterion == "D":
            return CriterionSpec.D(self.model_spec())
        if self.criterion == "ARD":
            return CriterionSpec.ARD(self.ard_z, self.ard_lambda, self.ard_J)
        if self.criterion == "MaxPro":
            return CriterionSpec.MaxPro(self.maxpro_z)
        raise ConfigurationError(f"criterion: unknown value {self.criterion!r}")

    def psa_config(self) -> PsaConfig:
        space = self.space()
        return PsaConfig(N=self.N, spec=self.privacy_spec(space), criterion=self.criterion_spec(),
                         space=space, blind_samples=self.blind_samples,
                         candidate_count=self.candidate_count, tuning_passes=self.tuning_passes,
                         exhaustive_threshold=self.exhaustive_threshold,
                         time_budget=self.time_budget, restarts=self.restarts, seed=self.seed)

    def validate(self) -> "ExperimentConfig":
        if self.privacy not in KINDS:
            raise ConfigurationError(f"privacy: unknown kind {self.privacy!r}")
        self.psa_config()
        for text in self.evaluate:
            parse_criterion(text, self)
        return self

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    # --- serialization ---------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "constraint":
                for row, b in value:
                    lines.append(f"constraint = {' '.join(_num(a) for a in row)} <= {_num(b)}")
            elif f.name == "ard_J":
                lines.append(f"ard_J = {' '.join(map(str, value))}")
            elif f.name == "evaluate":
                if value:
                    lines.append(f"evaluate = {'; '.join(value)}")
            elif isinstance(value, bool):
                lines.append(f"{f.name} = {'true' if value else 'false'}")
            elif isinstance(value, float):
                lines.append(f"{f.name} = {_num(value)}")
            else:
                lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


def _num(x: float) -> str:
    return repr(float(x))


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}
_INT = {"d", "N", "L", "grid_k", "blind_samples", "candidate_count", "tuning_passes",
        "exhaustive_threshold", "restarts", "seed", "probe_uniform"}
_FLOAT = {"delta", "ard_z", "ard_lambda", "maxpro_z", "time_budget", "bench_total", "bench_interval"}


def _parse_number(key: str, text: str, kind):
    try:
        if kind is float and "/" in text:
            num, den = text.split("/")
            return float(num) / float(den)
        return kind(text)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None


def parse_constraint(text: str) -> Tuple[Tuple[float, ...], float]:
    if "<=" not in text:
        raise ConfigurationError(f"constraint: expected 'a1 ... ad <= b', got {text!r}")
    lhs, rhs = text.split("<=")
    row = tuple(_parse_number("constraint", t, float) for t in lhs.split())
    return row, _parse_number("constraint", rhs.strip(), float)


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    constraints: List = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "constraint":
            constraints.append(parse_constraint(value))
            continue
        if key not in _FIELDS:
            raise ConfigurationError(f"{key}: unknown configuration key (line {lineno})")
        if key in values:
            raise ConfigurationError(f"{key}: given twice (line {lineno})")
        if key in _INT:
            values[key] = _parse_number(key, value, int)
        elif key in _FLOAT:
            values[key] = _parse_number(key, value, float)
        elif key == "ard_J":
            values[key] = tuple(_parse_number(key, t, int) for t in value.replace(",", " ").split())
        elif key == "probe_vertices":
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigurationError(f"{key}: expected true/false, got {value!r}")
            values[key] = value.lower() in ("true", "1", "yes")
        elif key == "evaluate":
            values[key] = tuple(s.strip() for s in value.split(";") if s.strip())
        else:
            values[key] = value
    if constraints:
        values["constraint"] = tuple(constraints)
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"config: cannot read {path}: {exc.strerror}") from None
    return parse_config(text).validate()


def parse_model(text: str, d: int) -> ModelSpec:
    if text in ("linear", "lin"):
        return ModelSpec.linear(d)
    if text in ("quadratic", "full_quadratic", "quad"):
        return ModelSpec.full_quadratic(d)
    raise ConfigurationError(f"model: unknown model {text!r} (linear or quadratic)")


def parse_criterion(text: str, cfg: ExperimentConfig) -> CriterionSpec:
    """Parse ``KIND[:key=value,...]``, e.g. ``ARD:J=1+2,z=1,lambda=1`` or ``D:linear``.

    Missing parameters default to the configuration's values.
    """
    kind, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        if "=" in item:
            k, v = item.split("=", 1)
            params[k.strip()] = v.strip()
        else:
            params["model"] = item
    try:
        if kind == "D":
            return CriterionSpec.D(parse_model(params.get("model", cfg.model), cfg.d))
        if kind == "ARD":
            J = tuple(int(j) for j in params["J"].split("+")) if "J" in params else cfg.ard_J
            return CriterionSpec.ARD(float(params.get("z", cfg.ard_z)),
                                     float(params.get("lambda", cfg.ard_lambda)), J)
        if kind == "MaxPro":
            return CriterionSpec.MaxPro(float(params.get("z", cfg.maxpro_z)))
    except ValueError as exc:
        raise ConfigurationError(f"evaluate: bad criterion {text!r}: {exc}") from None
    raise ConfigurationError(f"evaluate: unknown criterion {text!r}")


def lhd_delta(N: int) -> float:
    """Spacing that turns a Bridge design on ``L = N`` levels into a Latin hypercube."""
    return 2.0 / (N - 1)

