"""Experiment configuration: flat INI sections with exhaustive defaults.

Every field has a default and every run snapshot serializes all of them, so a
config file plus the code version pins an experiment completely. Numbers are
written with 9 significant digits for stable round trips.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
import os
from dataclasses import dataclass, field

DATASET_KINDS = ("blobs", "two-moons", "idx")
MODEL_KINDS = ("cnn", "mlp")
AUGMENT_MODES = ("none", "mixup", "cutmix", "augmix")
OBJECTIVE_VARIANTS = ("none", "csa", "sa-only", "supcon")
OPTIMIZER_KINDS = ("sgd", "adam")
SCHEDULE_KINDS = ("cosine", "step", "constant")


def fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


@dataclass
class DatasetConfig:
    kind: str = "blobs"
    n_train: int = 512
    n_test: int = 512
    classes: int = 4
    noise: float = 0.08
    image_size: int = 8
    idx_dir: str = ""
    limit: int = 1024


@dataclass
class ModelConfig:
    kind: str = "cnn"
    hidden: str = "64"
    channels: str = "8,16"
    embed_dim: int = 32


@dataclass
class AugmentSection:
    mode: str = "augmix"
    alpha: float = 1.0
    width: int = 3
    depth: int = 3
    dirichlet: float = 1.0
    beta: float = 1.0
    pool: str = "translate-x,translate-y,brightness-shift,contrast-scale"
    magnitude_cap: float = 1.0


@dataclass
class ObjectiveSection:
    variant: str = "csa"
    gamma: float = 0.25
    lambda_jsd: float = 12.0
    margin: float = 1.0
    supcon_temperature: float = 0.1


@dataclass
class OptimizerSection:
    kind: str = "sgd"
    lr: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 0.0005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class ScheduleSection:
    kind: str = "cosine"
    period: int = 10
    factor: float = 0.5


@dataclass
class RunSection:
    epochs: int = 30
    batch_size: int = 128
    seed: int = 0
    eval_every: int = 0
    eval_seed: int = 9973
    out_dir: str = "runs"
    record_timing: bool = True


@dataclass
class ExperimentConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    augment: AugmentSection = field(default_factory=AugmentSection)
    objective: ObjectiveSection = field(default_factory=ObjectiveSection)
    optimizer: OptimizerSection = field(default_factory=OptimizerSection)
    schedule: ScheduleSection = field(default_factory=ScheduleSection)
    run: RunSection = field(default_factory=RunSection)

    def sections(self):
        return {
            "dataset": self.dataset,
            "model": self.model,
            "augment": self.augment,
            "objective": self.objective,
            "optimizer": self.optimizer,
            "schedule": self.schedule,
            "run": self.run,
        }

    @property
    def objective_mode(self) -> str:
        return {"none": "normal", "mixup": "mixing", "cutmix": "mixing", "augmix": "consistency"}[
            self.augment.mode
        ]

    def hidden_widths(self) -> list:
        return [int(v) for v in self.model.hidden.split(",") if v.strip()]

    def channel_widths(self) -> list:
        return [int(v) for v in self.model.channels.split(",") if v.strip()]

    def pool_kinds(self) -> tuple:
        return tuple(k.strip() for k in self.augment.pool.split(",") if k.strip())

    def validate(self):
        checks = [
            (self.dataset.kind in DATASET_KINDS, f"dataset.kind '{self.dataset.kind}' not in {DATASET_KINDS}"),
            (self.model.kind in MODEL_KINDS, f"model.kind '{self.model.kind}' not in {MODEL_KINDS}"),
            (self.augment.mode in AUGMENT_MODES, f"augment.mode '{self.augment.mode}' not in {AUGMENT_MODES}"),
            (self.objective.variant in OBJECTIVE_VARIANTS,
             f"objective.variant '{self.objective.variant}' not in {OBJECTIVE_VARIANTS}"),
            (self.optimizer.kind in OPTIMIZER_KINDS,
             f"optimizer.kind '{self.optimizer.kind}' not in {OPTIMIZER_KINDS}"),
            (self.schedule.kind in SCHEDULE_KINDS,
             f"schedule.kind '{self.schedule.kind}' not in {SCHEDULE_KINDS}"),
            (0.0 <= self.objective.gamma <= 1.0, f"objective.gamma {self.objective.gamma} outside [0, 1]"),
            (self.objective.margin > 0, "objective.margin must be > 0"),
            (self.objective.lambda_jsd >= 0, "objective.lambda_jsd must be >= 0"),
            (self.run.epochs >= 0, "run.epochs must be >= 0"),
            (self.run.batch_size >= 1, "run.batch_size must be >= 1"),
            (self.dataset.classes >= 2, "dataset.classes must be >= 2"),
            (self.dataset.image_size >= 4, "dataset.image_size must be >= 4"),
        ]
        for ok, message in checks:
            if not ok:
                raise ValueError(f"invalid config: {message}")
        if self.augment.mode == "none" and self.objective.variant != "none":
            raise ValueError("invalid config: alignment variants require an augmentation mode")
        if self.dataset.kind == "idx":
            for name in ("train-images.idx", "train-labels.idx", "test-images.idx", "test-labels.idx"):
                path = os.path.join(self.dataset.idx_dir, name)
                if not os.path.exists(path):
                    raise ValueError(f"invalid config: dataset.idx_dir is missing '{path}'")
        return self

    # -- serialization -----------------------------------------------------

    def canonical_lines(self) -> list:
        lines = []
        for section_name, section in self.sections().items():
            for f in dataclasses.fields(section):
                lines.append(f"{section_name}.{f.name}={fmt_value(getattr(section, f.name))}")
        return sorted(lines)

    def config_hash(self) -> str:
        digest = hashlib.sha256("\n".join(self.canonical_lines()).encode()).hexdigest()
        return digest[:12]

    def run_id(self) -> str:
        return f"{self.config_hash()}-s{self.run.seed}"

    def dumps(self) -> str:
        parser = configparser.ConfigParser()
        for section_name, section in self.sections().items():
            parser[section_name] = {
                f.name: fmt_value(getattr(section, f.name)) for f in dataclasses.fields(section)
            }
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def write(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        try:
            parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ValueError(f"config parse error in {source}: {exc}") from exc
        cfg = cls()
        sections = cfg.sections()
        for section_name in parser.sections():
            if section_name not in sections:
                raise ValueError(f"{source}: unknown config section [{section_name}]")
            section = sections[section_name]
            known = {f.name: f for f in dataclasses.fields(section)}
            for key, raw in parser[section_name].items():
                if key not in known:
                    raise ValueError(f"{source}: unknown key '{key}' in section [{section_name}]")
                setattr(section, key, _convert(raw, known[key], section_name, key, source))
        return cfg.validate()

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.loads(fh.read(), source=path)


def _convert(raw: str, f: dataclasses.Field, section: str, key: str, source: str):
    try:
        if f.type in ("int", int):
            return int(raw)
        if f.type in ("float", float):
            return float(raw)
        if f.type in ("bool", bool):
            lowered = raw.strip().lower()
            if lowered in ("true", "1", "yes", "on"):
                return True
            if lowered in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: '{raw}'")
        return raw
    except ValueError as exc:
        raise ValueError(f"{source}: bad value for {section}.{key}: {exc}") from exc


def replace_section(config: ExperimentConfig, section: str, **updates) -> ExperimentConfig:
    """Copy of the config with one section's fields replaced."""
    kwargs = {name: dataclasses.replace(sec) for name, sec in config.sections().items()}
    kwargs[section] = dataclasses.replace(kwargs[section], **updates)
    return ExperimentConfig(**kwargs).validate()
