"""Pipeline configuration: parsing, validation, and the published schema.

Validation is all-at-once: every violation in a config document is collected
and reported in a single ConfigError rather than one at a time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

from .errors import ConfigError
from .explain import LimeConfig
from .models import ALGORITHMS, ModelSpec, REGISTRY
from .rng import derive_seed
from .synth import SynthSpec

SCHEMA_VERSION = 1

MISSING_POLICIES = ("fill_mean", "drop_rows")


@dataclass
class PipelineConfig:
    """Everything one pipeline run depends on, seeds included."""

    seed: int = 0
    csv_path: str | None = None
    target_column: str | None = None
    synth: SynthSpec | None = None
    missing_policy: str = "fill_mean"
    schema_overrides: dict = field(default_factory=dict)
    oversample: bool = True
    leak_safe: bool = False
    repeats: int = 20
    test_frac: float = 0.12
    models: list = field(default_factory=list)  # list[ModelSpec]
    lime: LimeConfig = field(default_factory=LimeConfig)
    select_k: int = 10
    n_explain: int = 100
    threads: int = 1
    out_dir: str = "out"

    def __post_init__(self):
        if not self.models:
            self.models = default_model_specs(self.seed)
        self.validate()

    def validate(self):
        problems = []
        if self.csv_path is None and self.synth is None:
            problems.append("input required: set either a csv path or synth parameters")
        if self.csv_path is not None and self.synth is not None:
            problems.append("csv input and synth input are mutually exclusive")
        if self.csv_path is not None and not self.target_column:
            problems.append("csv input requires a target column name")
        if self.missing_policy not in MISSING_POLICIES:
            problems.append(
                f"missing_policy must be one of {MISSING_POLICIES}, "
                f"got {self.missing_policy!r}"
            )
        if self.repeats < 1:
            problems.append(f"split repeats must be >= 1, got {self.repeats}")
        if not 0.0 < self.test_frac < 1.0:
            problems.append(f"test_frac must be in (0, 1), got {self.test_frac}")
        if self.select_k < 1:
            problems.append(f"select_k must be >= 1, got {self.select_k}")
        if self.n_explain < 1:
            problems.append(f"n_explain must be >= 1, got {self.n_explain}")
        if self.threads < 1:
            problems.append(f"threads must be >= 1, got {self.threads}")
        for name, kind in self.schema_overrides.items():
            if kind not in ("categorical", "numeric"):
                problems.append(
                    f"schema override for {name!r} must be 'categorical' or "
                    f"'numeric', got {kind!r}"
                )
        if problems:
            raise ConfigError("invalid configuration: " + "; ".join(problems))

    def to_json_dict(self) -> dict:
        # threads and out_dir are execution environment, not pipeline
        # definition: results are independent of both, and leaving them out
        # keeps report.json byte-identical across thread counts
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "input": (
                {"csv": self.csv_path, "target": self.target_column}
                if self.csv_path is not None
                else {"synth": asdict(self.synth)}
            ),
            "missing_policy": self.missing_policy,
            "schema_overrides": dict(self.schema_overrides),
            "oversample": self.oversample,
            "leak_safe": self.leak_safe,
            "splits": {"repeats": self.repeats, "test_frac": self.test_frac},
            "models": [
                {
                    "algorithm": m.algorithm,
                    "hyperparameters": dict(m.hyperparameters),
                    "seed": m.seed,
                }
                for m in self.models
            ],
            "lime": asdict(self.lime),
            "select_k": self.select_k,
            "n_explain": self.n_explain,
        }


def default_model_specs(master_seed: int) -> list[ModelSpec]:
    """The full zoo, each model on its own named seed stream."""
    return [
        ModelSpec(alg, {}, derive_seed(master_seed, f"model:{alg}"))
        for alg in ALGORITHMS
    ]


_TOP_LEVEL_KEYS = {
    "schema_version", "seed", "input", "missing_policy", "schema_overrides",
    "oversample", "leak_safe", "splits", "models", "lime", "select_k",
    "n_explain", "threads", "out_dir",
}


def config_from_dict(doc: dict) -> PipelineConfig:
    """Build a validated PipelineConfig from a parsed JSON document."""
    problems = []
    unknown = sorted(set(doc) - _TOP_LEVEL_KEYS)
    if unknown:
        problems.append(f"unknown config key(s): {', '.join(unknown)}")
    seed = int(doc.get("seed", 0))

    csv_path = target = None
    synth = None
    source = doc.get("input", {})
    if "csv" in source:
        csv_path = source["csv"]
        target = source.get("target")
    if "synth" in source:
        try:
            synth_doc = dict(source["synth"])
            synth_doc.setdefault("seed", derive_seed(seed, "synth"))
            synth = SynthSpec(**synth_doc)
        except (TypeError, ConfigError) as exc:
            problems.append(f"synth: {exc}")

    splits = doc.get("splits", {})
    models: list[ModelSpec] = []
    for position, entry in enumerate(doc.get("models", [])):
        if isinstance(entry, str):
            entry = {"algorithm": entry}
        algorithm = entry.get("algorithm", "?")
        try:
            models.append(
                ModelSpec(
                    algorithm,
                    entry.get("hyperparameters", {}),
                    entry.get(
                        "seed", derive_seed(seed, f"model:{algorithm}", position)
                    ),
                )
            )
        except ConfigError as exc:
            problems.append(str(exc))

    lime = LimeConfig()
    try:
        lime_doc = dict(doc.get("lime", {}))
        lime_doc.setdefault("seed", derive_seed(seed, "explain"))
        lime = LimeConfig(**lime_doc)
    except (TypeError, ConfigError) as exc:
        problems.append(f"lime: {exc}")

    if problems:
        raise ConfigError("invalid configuration: " + "; ".join(problems))

    return PipelineConfig(
        seed=seed,
        csv_path=csv_path,
        target_column=target,
        synth=synth,
        missing_policy=doc.get("missing_policy", "fill_mean"),
        schema_overrides=dict(doc.get("schema_overrides", {})),
        oversample=bool(doc.get("oversample", True)),
        leak_safe=bool(doc.get("leak_safe", False)),
        repeats=int(splits.get("repeats", 20)),
        test_frac=float(splits.get("test_frac", 0.12)),
        models=models,
        lime=lime,
        select_k=int(doc.get("select_k", 10)),
        n_explain=int(doc.get("n_explain", 100)),
        threads=int(doc.get("threads", 1)),
        out_dir=doc.get("out_dir", "out"),
    )


def config_from_json(text: str) -> PipelineConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config JSON must be an object")
    return config_from_dict(doc)


def config_schema() -> dict:
    """Machine-readable description of the accepted config document."""
    return {
        "schema_version": SCHEMA_VERSION,
        "fields": {
            "seed": "integer master seed; every random stream derives from it",
            "input": {
                "csv": "path to a CSV file (requires 'target')",
                "target": "name of the target column",
                "synth": {
                    "n_rows": "int >= 4*n_classes (default 2000)",
                    "n_classes": "int >= 2 (default 3)",
                    "n_features": "int >= 1 (default 18)",
                    "n_informative": "0..n_features (default 5)",
                    "separation": "class-mean separation in noise-std units (default 3.0)",
                    "noise_std": "float > 0 (default 1.0)",
                    "seed": "optional; derived from the master seed when absent",
                },
            },
            "missing_policy": f"one of {list(MISSING_POLICIES)} (default fill_mean)",
            "schema_overrides": "column name -> 'categorical' | 'numeric'",
            "oversample": "bool, duplicate minority rows to balance (default true)",
            "leak_safe": "bool, preprocess per split instead of up front (default false)",
            "splits": {"repeats": "int >= 1 (default 20)",
                       "test_frac": "0 < f < 1 (default 0.12)"},
            "models": [
                {
                    "algorithm": f"one of {list(ALGORITHMS)}",
                    "hyperparameters": {
                        alg: sorted(REGISTRY[alg].DEFAULTS) for alg in ALGORITHMS
                    },
                    "seed": "optional; derived from the master seed when absent",
                }
            ],
            "lime": {
                "n_samples": "int (default 5000)",
                "kernel_width": "float >= 1e-12 or null for 0.75*sqrt(d)",
                "ridge_alpha": "float >= 0 (default 1.0)",
                "k_features": "int >= 1 (default 10)",
                "seed": "optional; derived from the master seed when absent",
            },
            "select_k": "int >= 1, features kept after ranking (default 10)",
            "n_explain": "int >= 1, explanations aggregated (default 100)",
            "threads": "int >= 1; results are identical for any value",
            "out_dir": "artifact directory (default 'out')",
        },
    }
