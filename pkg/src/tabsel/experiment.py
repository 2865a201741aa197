"""Experiment configuration and the end-to-end grid run.

A config is a single JSON document::

    {
      "dataset": "lab.csv",
      "schema": "lab.schema.json",
      "delimiter": ",",
      "encoding": "ordinal",
      "missing_tokens": [""],
      "split": {"test_fraction": 0.3, "stratified": true, "seed": null},
      "selections": [{"method": "none"}, {"method": "boruta", "rounds": 1}],
      "classifiers": [{"kind": "rf"}, {"kind": "knn", "k": 5}],
      "seed": 42,
      "repeats": 1,
      "output_dir": "out"
    }

Relative paths resolve against the config file's directory.  ``resolve()``
fills every default, derives the split seed from the master seed when it is
null, and returns a config whose JSON form fully determines the run.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from . import ingest
from .errors import ConfigError, TabselError
from .evaluation import SELECTION_METHODS, GridResult, run_grid, summarize_repeats
from .models import KINDS, make_estimator
from .models.forest import RandomForestParams
from .seeding import derive_seed

DEFAULT_SELECTIONS = [
    {"method": "none"},
    {"method": "boruta"},
    {"method": "ridge"},
    {"method": "rff"},
]
DEFAULT_CLASSIFIERS = [{"kind": k} for k in ("nb", "mlp", "knn", "rf", "lr", "dt")]

SELECTION_DEFAULTS = {
    "none": {},
    "boruta": {"rounds": 1, "forest": RandomForestParams().to_json()},
    "ridge": {"alpha": 1.0, "rel_threshold": 0.1},
    "rff": {"D": 256, "sigma": None},
}
MAX_SEED = 2 ** 64


@dataclass
class ExperimentConfig:
    dataset: str
    schema: str | list
    delimiter: str = ","
    encoding: str = "ordinal"
    missing_tokens: list = field(default_factory=lambda: [""])
    split: dict = field(default_factory=dict)
    selections: list = field(default_factory=lambda: copy.deepcopy(DEFAULT_SELECTIONS))
    classifiers: list = field(default_factory=lambda: copy.deepcopy(DEFAULT_CLASSIFIERS))
    seed: int = 42
    repeats: int = 1
    output_dir: str = "out"
    rank: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, doc: dict, base_dir=None) -> "ExperimentConfig":
        if "config" in doc and "dataset" not in doc:
            doc = doc["config"]  # a results.json sidecar
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            cfg = cls(**copy.deepcopy(doc))
        except TypeError as exc:
            raise ConfigError(f"invalid config: {exc}") from None
        if base_dir is not None:
            base = Path(base_dir)
            cfg.dataset = str((base / cfg.dataset).resolve())
            if isinstance(cfg.schema, str):
                cfg.schema = str((base / cfg.schema).resolve())
            cfg.output_dir = str((base / cfg.output_dir).resolve())
        return cfg

    def to_json(self) -> dict:
        return {name: copy.deepcopy(getattr(self, name)) for name in self.__dataclass_fields__}

    def schema_columns(self) -> list:
        if isinstance(self.schema, list):
            return ingest.schema_from_json(self.schema)
        return ingest.load_schema(self.schema)

    def resolve(self) -> "ExperimentConfig":
        """Validate and return a copy with every default made explicit."""
        cfg = ExperimentConfig.from_json(self.to_json())
        if not isinstance(cfg.seed, int) or not 0 <= cfg.seed < MAX_SEED:
            raise ConfigError(f"seed must be an integer in [0, 2^64), got {cfg.seed!r}")
        if not Path(cfg.dataset).is_file():
            raise ConfigError(f"dataset file not found: {cfg.dataset}")
        if isinstance(cfg.schema, str) and not Path(cfg.schema).is_file():
            raise ConfigError(f"schema file not found: {cfg.schema}")
        if cfg.encoding not in ingest.STRATEGIES:
            raise ConfigError(f"encoding must be one of {ingest.STRATEGIES}")
        if not isinstance(cfg.repeats, int) or cfg.repeats < 1:
            raise ConfigError("repeats must be a positive integer")
        if len(cfg.delimiter) != 1:
            raise ConfigError("delimiter must be a single character")

        split = {"test_fraction": 0.3, "stratified": True, "seed": None, **cfg.split}
        frac = split["test_fraction"]
        if not isinstance(frac, (int, float)) or not 0 < frac < 1:
            raise ConfigError(f"split.test_fraction must lie in (0, 1), got {frac!r}")
        if split["seed"] is None:
            split["seed"] = derive_seed(cfg.seed, "split")
        elif not isinstance(split["seed"], int) or not 0 <= split["seed"] < MAX_SEED:
            raise ConfigError("split.seed must be a non-negative 64-bit integer")
        cfg.split = split

        sels = []
        for spec in cfg.selections:
            method = spec.get("method", "none")
            if method not in SELECTION_METHODS:
                raise ConfigError(f"unknown selection method {method!r}")
            full = {"method": method, **copy.deepcopy(SELECTION_DEFAULTS[method]), **spec}
            if method == "boruta":
                try:
                    full["forest"] = RandomForestParams(**{**RandomForestParams().to_json(),
                                                           **spec.get("forest", {})}).to_json()
                except (TypeError, TabselError) as exc:
                    raise ConfigError(f"boruta forest parameters: {exc}") from None
            sels.append(full)
        cfg.selections = sels

        clfs = []
        for spec in cfg.classifiers:
            kind = spec.get("kind")
            if kind not in KINDS:
                raise ConfigError(f"unknown classifier kind {kind!r}; expected one of {KINDS}")
            params = {k: v for k, v in spec.items() if k not in ("kind", "name")}
            try:
                full = make_estimator(kind, params).params()
            except TabselError as exc:
                raise ConfigError(str(exc)) from None
            clfs.append({"kind": kind, **({"name": spec["name"]} if "name" in spec else {}), **full})
        cfg.classifiers = clfs

        labels = [s.get("name") or s["method"] for s in sels]
        if len(set(labels)) != len(labels):
            raise ConfigError("selection labels must be unique; add a 'name' to repeated methods")
        labels = [c.get("name") or c["kind"] for c in clfs]
        if len(set(labels)) != len(labels):
            raise ConfigError("classifier labels must be unique; add a 'name' to repeated kinds")

        cfg.rank = {"bins": 10, **cfg.rank}
        try:
            cfg.schema_columns()
        except (TabselError, OSError, ValueError) as exc:
            raise ConfigError(f"schema: {exc}") from None
        return cfg


def load_config(path, seed: int | None = None, output_dir=None) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    cfg = ExperimentConfig.from_json(doc, base_dir=path.parent)
    if seed is not None:
        cfg.seed = seed
    if output_dir is not None:
        cfg.output_dir = str(Path(output_dir).resolve())
    return cfg.resolve()


def load_table(cfg: ExperimentConfig):
    """Parse the dataset and drop rows with missing tokens."""
    schema = cfg.schema_columns()
    table = ingest.read_table(cfg.dataset, schema, cfg.delimiter)
    return ingest.drop_missing(table, set(cfg.missing_tokens)), schema


def load_dataset(cfg: ExperimentConfig):
    table, schema = load_table(cfg)
    return ingest.encode(table, schema, cfg.encoding)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    grids: list
    n_train: int
    n_test: int
    encoding: object = None

    @property
    def grid(self) -> GridResult:
        return self.grids[0]

    def repeat_summary(self):
        return summarize_repeats(self.grids)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> ExperimentResult:
    """Run the selection x classifier grid described by ``cfg``.

    With ``repeats > 1`` the whole run (split included) is repeated under
    master seeds derived from ``cfg.seed``; the first repeat uses the
    configured seeds unchanged.
    """
    cfg = cfg.resolve()
    data, emap = load_dataset(cfg)
    grids = []
    n_train = n_test = 0
    for rep in range(cfg.repeats):
        seed = cfg.seed if rep == 0 else derive_seed(cfg.seed, "repeat", rep)
        split_seed = cfg.split["seed"] if rep == 0 else derive_seed(seed, "split")
        train, test = ingest.split(data, cfg.split["test_fraction"], split_seed, cfg.split["stratified"])
        if rep == 0:
            n_train, n_test = train.n, test.n
        grids.append(run_grid(train, test, cfg.selections, cfg.classifiers, seed=seed, jobs=jobs))
    return ExperimentResult(cfg, grids, n_train, n_test, emap)
