"""Versioned YAML experiment configuration with strict validation.

Variances are given either linear (``v_sq``) or in dB (``v_sq_db``), never
both; angles are given in degrees (``*_deg``) and converted to radians here.
Unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..entangle import BeamSplitterSpec, DetectionImperfections
from ..errors import ConfigError
from ..gaussian import MCConfig
from ..stokes import PolSqueezedSource

SCHEMA_VERSION = 1
SCENARIOS = ("characterize_squeezing", "entangle_sq_basis", "entangle_opt_basis", "witnesses", "sweep")
SWEEP_AXES = ("t", "v_asq", "angle_error", "efficiency", "visibility", "gain")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _one_of(obj, lin: str, db: str):
    a, b = getattr(obj, lin), getattr(obj, db)
    if (a is None) == (b is None):
        raise ValueError(f"give exactly one of '{lin}' or '{db}'")


class SourceConfig(_Strict):
    v_sq: Optional[float] = Field(None, gt=0)
    v_sq_db: Optional[float] = None
    v_asq: Optional[float] = Field(None, gt=0)
    v_asq_db: Optional[float] = None
    theta_sq_deg: float = 0.0
    s3_mean: float = 1.0

    @model_validator(mode="after")
    def _units(self):
        _one_of(self, "v_sq", "v_sq_db")
        _one_of(self, "v_asq", "v_asq_db")
        return self

    def to_source(self) -> PolSqueezedSource:
        v_sq = self.v_sq if self.v_sq is not None else 10 ** (self.v_sq_db / 10)
        v_asq = self.v_asq if self.v_asq is not None else 10 ** (self.v_asq_db / 10)
        return PolSqueezedSource(v_sq, v_asq, np.radians(self.theta_sq_deg), self.s3_mean)


class BeamSplitterConfig(_Strict):
    t: float = Field(0.5, ge=0.0, le=1.0)


class DetectionConfig(_Strict):
    efficiency_c: float = Field(1.0, gt=0.0, le=1.0)
    efficiency_d: float = Field(1.0, gt=0.0, le=1.0)
    visibility: float = Field(1.0, gt=0.0, le=1.0)
    angle_error_c_deg: float = 0.0
    angle_error_d_deg: float = 0.0

    def to_imperfections(self) -> DetectionImperfections:
        return DetectionImperfections(self.efficiency_c, self.efficiency_d, self.visibility,
                                      np.radians(self.angle_error_c_deg), np.radians(self.angle_error_d_deg))


class GainConfig(_Strict):
    strategy: Literal["fixed", "closed-form", "brute-force"] = "brute-force"
    value: float = Field(1.0, gt=0.0)


class MonteCarloConfig(_Strict):
    samples: int = Field(1_000_000, ge=10_000)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    shards: int = Field(1, ge=1)
    workers: int = Field(1, ge=1)

    def to_mc(self) -> MCConfig:
        return MCConfig(self.samples, self.seed, self.shards, self.workers)


class MeasuredConfig(_Strict):
    """Measured normalised correlation variances (linear) used for inference and witnesses."""

    asq_difference: Optional[float] = Field(None, gt=0)
    pairs: list[tuple[float, float]] = Field(default_factory=list)


class SweepConfig(_Strict):
    axis: Literal["t", "v_asq", "angle_error", "efficiency", "visibility", "gain"]
    grid: list[float] = Field(min_length=1)
    workers: int = Field(1, ge=1)


class OracleConfig(_Strict):
    n_max: list[int] = Field(default_factory=lambda: [3, 8])
    coherent_alpha_sq: float = Field(2.0, gt=0)
    coherent_n_max: int = Field(16, ge=1, le=32)


class OutputConfig(_Strict):
    dir: str = "results"
    stem: Optional[str] = None


class ExperimentConfig(_Strict):
    schema_version: Literal[1]
    scenario: Literal["characterize_squeezing", "entangle_sq_basis", "entangle_opt_basis", "witnesses", "sweep"]
    source_a: SourceConfig
    source_b: SourceConfig
    beam_splitter: BeamSplitterConfig = BeamSplitterConfig()
    detection: DetectionConfig = DetectionConfig()
    gain: GainConfig = GainConfig()
    monte_carlo: MonteCarloConfig = MonteCarloConfig()
    measured: MeasuredConfig = MeasuredConfig()
    sweep: Optional[SweepConfig] = None
    oracle: OracleConfig = OracleConfig()
    output: OutputConfig = OutputConfig()

    @model_validator(mode="after")
    def _sweep_present(self):
        if self.scenario == "sweep" and self.sweep is None:
            raise ValueError("scenario 'sweep' needs a 'sweep' section")
        return self

    @property
    def sources(self) -> tuple[PolSqueezedSource, PolSqueezedSource]:
        return self.source_a.to_source(), self.source_b.to_source()

    @property
    def splitter(self) -> BeamSplitterSpec:
        return BeamSplitterSpec(self.beam_splitter.t)

    @property
    def imperfections(self) -> DetectionImperfections:
        return self.detection.to_imperfections()

    @property
    def stem(self) -> str:
        return self.output.stem or self.scenario

    def config_hash(self) -> str:
        canon = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def _key_lines(node, path=()) -> dict[tuple, int]:
    """Map key paths in a composed YAML tree to 1-based line numbers."""
    lines: dict[tuple, int] = {}
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            p = path + (key.value,)
            lines[p] = key.start_mark.line + 1
            lines.update(_key_lines(value, p))
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            p = path + (i,)
            lines[p] = item.start_mark.line + 1
            lines.update(_key_lines(item, p))
    return lines


def _line_for(loc: tuple, lines: dict[tuple, int]) -> int | None:
    for n in range(len(loc), 0, -1):
        if loc[:n] in lines:
            return lines[loc[:n]]
    return None


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{source}: YAML syntax error: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    lines = _key_lines(node) if node is not None else {}
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        msgs = []
        for err in exc.errors():
            loc = tuple(err["loc"])
            where = ".".join(str(p) for p in loc) or "<root>"
            line = _line_for(loc, lines)
            prefix = f"{source}:{line}" if line else source
            msgs.append(f"{prefix}: {where}: {err['msg']}")
        raise ConfigError("\n".join(msgs)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
