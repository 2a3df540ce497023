"""Run configuration: defaults, INI-style config files, and environment
override.  Precedence is CLI flags > config file > defaults; the config file
path itself comes from --config or the KDEVAL_CONFIG environment variable.
"""

import configparser
import dataclasses
import os

from .density import DEFAULT_FOLDS, BandwidthSearchSpec
from .kdi import KdiParams
from .partitions import GENERATORS

ENV_CONFIG = "KDEVAL_CONFIG"

DEFAULT_INDICES = ("ch", "sc", "db", "new")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything a benchmark run needs; the seed is mandatory."""

    seed: int
    k_min: int = 2
    k_max: int = 30
    indices: tuple = DEFAULT_INDICES
    generators: tuple = GENERATORS
    emit_svg: bool = False
    include_variants: bool = False
    boundary_mix_weight: float = 0.0
    kdi_params: KdiParams = None
    bandwidth_grid: tuple = ()  # empty: per-cluster scale-relative grid
    folds: int = DEFAULT_FOLDS

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("seed is mandatory")
        if self.k_min < 1 or self.k_max < self.k_min:
            raise ValueError(f"bad k range [{self.k_min}, {self.k_max}]")
        unknown = set(self.indices) - {"ch", "sc", "db", "new"}
        if unknown:
            raise ValueError(f"unknown indices: {sorted(unknown)}")
        unknown = set(self.generators) - set(GENERATORS)
        if unknown:
            raise ValueError(f"unknown generators: {sorted(unknown)}")
        if not 0.0 <= self.boundary_mix_weight <= 1.0:
            raise ValueError("boundary_mix_weight must be in [0, 1]")
        if self.kdi_params is None:
            object.__setattr__(self, "kdi_params", KdiParams(seed=self.seed))

    def bw_spec(self):
        """Explicit BandwidthSearchSpec, or None for the per-cluster default."""
        if not self.bandwidth_grid:
            return None
        return BandwidthSearchSpec(grid=self.bandwidth_grid, folds=self.folds, seed=self.seed)


_KDI_FIELDS = {f.name: f.type for f in dataclasses.fields(KdiParams)}

_BOOL_KDI = ("pair_local", "boundary_members_only", "s_v3_normalize")
_INT_KDI = ("min_cluster_size", "mc_samples", "seed")
_STR_KDI = ("ambiguous_variant", "similarity_variant", "s_v3_center", "s_v3_metric")


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_list(text):
    return tuple(part.strip() for part in text.split(",") if part.strip())


def load_config_file(path):
    """Parse a config file into a flat {(section, key): string} dict."""
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            out[(section, key)] = value
    return out


def resolve_config_path(cli_path=None):
    """Config file path from the CLI flag, else the environment, else None."""
    if cli_path:
        return cli_path
    return os.environ.get(ENV_CONFIG) or None


def build_run_config(seed, file_overrides=None, **cli_overrides):
    """Assemble a RunConfig from defaults, file overrides, and CLI overrides.

    cli_overrides use RunConfig/KdiParams field names with None meaning
    'not given'.
    """
    values = {
        "k_min": 2,
        "k_max": 30,
        "indices": DEFAULT_INDICES,
        "generators": GENERATORS,
        "emit_svg": False,
        "include_variants": False,
        "boundary_mix_weight": 0.0,
        "bandwidth_grid": (),
        "folds": DEFAULT_FOLDS,
    }
    kdi_values = {}
    file_overrides = file_overrides or {}
    for (section, key), text in file_overrides.items():
        if section == "run":
            if key in ("k_min", "k_max", "folds"):
                values[key] = int(text)
            elif key == "seed":
                seed = int(text) if seed is None else seed
            elif key in ("emit_svg", "include_variants"):
                values[key] = _parse_bool(text)
            elif key == "boundary_mix_weight":
                values[key] = float(text)
            elif key == "indices":
                values["indices"] = _parse_list(text)
            elif key == "generators":
                values["generators"] = _parse_list(text)
            else:
                raise ValueError(f"unknown [run] option {key!r}")
        elif section == "bandwidth":
            if key == "grid":
                values["bandwidth_grid"] = tuple(float(v) for v in _parse_list(text))
            elif key == "folds":
                values["folds"] = int(text)
            else:
                raise ValueError(f"unknown [bandwidth] option {key!r}")
        elif section == "kdi":
            if key not in _KDI_FIELDS:
                raise ValueError(f"unknown [kdi] option {key!r}")
            if key in _BOOL_KDI:
                kdi_values[key] = _parse_bool(text)
            elif key in _INT_KDI:
                kdi_values[key] = int(text)
            elif key in _STR_KDI:
                kdi_values[key] = text.strip()
            else:
                kdi_values[key] = float(text)
        else:
            raise ValueError(f"unknown config section {section!r}")
    if seed is None:
        raise ValueError("seed is mandatory (CLI flag or [run] seed)")
    for key, value in cli_overrides.items():
        if value is None:
            continue
        if key in _KDI_FIELDS:
            kdi_values[key] = value
        else:
            values[key] = value
    kdi_values.setdefault("seed", seed)
    return RunConfig(seed=seed, kdi_params=KdiParams(**kdi_values), **values)


def save_params_config(path, params, seed=None):
    """Write KdiParams (and optionally the run seed) as a config file that
    build_run_config can read back."""
    parser = configparser.ConfigParser()
    parser.add_section("kdi")
    for f in dataclasses.fields(KdiParams):
        parser.set("kdi", f.name, str(getattr(params, f.name)))
    if seed is not None:
        parser.add_section("run")
        parser.set("run", "seed", str(seed))
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def config_snapshot(config):
    """Ordered (key, value) pairs describing the full configuration, used in
    report headers so runs are reproducible from their outputs."""
    items = [
        ("seed", config.seed),
        ("k_min", config.k_min),
        ("k_max", config.k_max),
        ("indices", ",".join(config.indices)),
        ("generators", ",".join(config.generators)),
        ("emit_svg", config.emit_svg),
        ("include_variants", config.include_variants),
        ("boundary_mix_weight", config.boundary_mix_weight),
        ("bandwidth_grid", ",".join(repr(h) for h in config.bandwidth_grid) or "auto"),
        ("folds", config.folds),
    ]
    for f in dataclasses.fields(KdiParams):
        items.append((f"kdi.{f.name}", getattr(config.kdi_params, f.name)))
    return items
