"""Pipeline configuration: a flat key=value file with dotted section prefixes.

Example:

    paths.corpus = fixtures/articles.jsonl
    paths.embeddings = fixtures/embeddings.jsonl
    thresholds.jaccard_min = 0.25
    flags.entity_freq_cap = none
    rng_seed = 7

Environment variables override file values with the prefix NEWSSYNC_ and a
double underscore standing in for the dot (NEWSSYNC_THRESHOLDS__JACCARD_MIN
overrides thresholds.jaccard_min). Unknown keys are an error naming the key.
All randomness flows from the single rng_seed; each stage derives its own
sub-seed from the stage name.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

ENV_PREFIX = "NEWSSYNC_"


@dataclass
class PathsConfig:
    corpus: str = ""
    length_factors: str = ""
    embeddings: str = ""
    predictors: str = ""
    pair_predictors: str = ""
    ratings: str = ""
    intrusion_answers: str = ""
    intrusion_truth: str = ""
    output: str = "out"


@dataclass
class ThresholdsConfig:
    min_entities: int = 10
    min_eq_words: float = 100.0
    jaccard_min: float = 0.25
    window_days: int = 5
    min_edge_weight: float = 0.5
    significance_threshold: float = 0.1
    backbone_alpha: float = 0.05
    vif_max: float = 5.0

    def validate(self) -> None:
        if self.min_entities < 0:
            raise ValueError("thresholds.min_entities must be >= 0")
        if self.min_eq_words < 0:
            raise ValueError("thresholds.min_eq_words must be >= 0")
        if not 0.0 <= self.jaccard_min < 1.0:
            raise ValueError("thresholds.jaccard_min must lie in [0, 1)")
        if self.window_days < 0:
            raise ValueError("thresholds.window_days must be >= 0")
        if not self.min_edge_weight > 0:
            raise ValueError("thresholds.min_edge_weight must be > 0")
        if not 0.0 < self.significance_threshold < 1.0:
            raise ValueError("thresholds.significance_threshold must lie in (0, 1)")
        if not 0.0 < self.backbone_alpha < 1.0:
            raise ValueError("thresholds.backbone_alpha must lie in (0, 1)")
        if not self.vif_max > 1.0:
            raise ValueError("thresholds.vif_max must be > 1")


@dataclass
class SamplingConfig:
    per_country: int = 0  # 0 disables the equal-weight subsample
    top_by_population: int = 100
    intrusion_largest: int = 20
    intrusion_random: int = 20


@dataclass
class FlagsConfig:
    clustering_fallback: bool = False
    entity_freq_cap: float | None = 0.1


@dataclass
class RegressConfig:
    gdp_high_threshold: float = 500e9
    democracy_high_threshold: float = 5.0


@dataclass
class PipelineConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    thresholds: ThresholdsConfig = field(default_factory=ThresholdsConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    flags: FlagsConfig = field(default_factory=FlagsConfig)
    regress: RegressConfig = field(default_factory=RegressConfig)
    rng_seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        self.thresholds.validate()
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def output_dir(self) -> Path:
        return Path(self.paths.output)


def _coerce(current, raw: str):
    raw = raw.strip()
    if isinstance(current, bool):
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if current is None or (isinstance(current, float) and raw.lower() in ("none", "off")):
        if raw.lower() in ("none", "off", ""):
            return None
        return float(raw)
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def _set_key(config: PipelineConfig, dotted: str, raw: str) -> None:
    parts = dotted.split(".")
    if len(parts) == 1:
        target, key = config, parts[0]
    elif len(parts) == 2:
        section_name, key = parts
        section_fields = {f.name for f in fields(config)}
        if section_name not in section_fields:
            raise ValueError(f"unknown config section in key {dotted!r}")
        target = getattr(config, section_name)
        if not hasattr(target, "__dataclass_fields__"):
            raise ValueError(f"config key {dotted!r} has no sub-keys")
    else:
        raise ValueError(f"invalid config key {dotted!r}")

    valid = {f.name for f in fields(target)}
    if key not in valid or hasattr(getattr(target, key), "__dataclass_fields__"):
        raise ValueError(f"unknown config key {dotted!r}")
    try:
        setattr(target, key, _coerce(getattr(target, key), raw))
    except ValueError as err:
        raise ValueError(f"bad value for {dotted!r}: {err}") from None


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> PipelineConfig:
    """Build a config from defaults, then the file, then environment overrides."""
    config = PipelineConfig()
    if path is not None:
        for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key = value, got {line!r}")
            key, raw = line.split("=", 1)
            _set_key(config, key.strip(), raw)
    env_map = os.environ if env is None else env
    for name, raw in sorted(env_map.items()):
        if not name.startswith(ENV_PREFIX):
            continue
        dotted = name[len(ENV_PREFIX) :].lower().replace("__", ".")
        _set_key(config, dotted, raw)
    return config


def config_lines(config: PipelineConfig) -> list[str]:
    """Flat key=value rendering of the fully resolved config (for provenance)."""
    lines: list[str] = []
    for f in fields(config):
        value = getattr(config, f.name)
        if hasattr(value, "__dataclass_fields__"):
            for sub in fields(value):
                lines.append(f"{f.name}.{sub.name} = {getattr(value, sub.name)}")
        else:
            lines.append(f"{f.name} = {value}")
    return sorted(lines)


def derive_seed(base_seed: int, stage: str) -> int:
    """Stable per-stage sub-seed from the pipeline seed and the stage name."""
    digest = hashlib.sha256(f"{base_seed}:{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "big") % (2**32)
