"""Experiment configuration: YAML file + CLI flag overrides, fully validated.

The file format is YAML with nested sections mirroring ExperimentConfig.
Unknown keys are rejected with their full key path; every value is range-
checked before any computation.  All computations are deterministic, so no
seeds appear anywhere.
"""

from dataclasses import asdict, dataclass, field

import yaml

from .lattice import FRAMES


@dataclass
class ChainSection:
    L: int = 250
    d: float = 1.0
    mu: float = 0.0
    frame: str = "fixed"


@dataclass
class ScheduleSection:
    tau: float = 10.0
    t_max: float = 10.0
    dt: float = 0.01


@dataclass
class QuenchSection:
    x_h0: float = 0.0
    x_ht: float = 1.0


@dataclass
class GridsSection:
    x_h0: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    x_ht: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    L: list = field(default_factory=lambda: [50, 100, 150, 200, 250])


@dataclass
class OtocSection:
    x_h: list = field(default_factory=lambda: [0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    site_i: int = None  # None -> horizon edge site
    offset: int = 20
    t_max: float = 60.0
    dt: float = 0.02
    d_lo: float = None  # None -> relative-to-peak windows
    d_hi: float = None


@dataclass
class NestedSection:
    x_ht: list = field(default_factory=lambda: [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0])
    k_max: int = 6
    probe_site: int = None  # None -> chain center


@dataclass
class RegularizationSection:
    enabled: bool = False
    t_max: float = 50.0


@dataclass
class ExperimentConfig:
    chain: ChainSection = field(default_factory=ChainSection)
    schedule: ScheduleSection = field(default_factory=ScheduleSection)
    quench: QuenchSection = field(default_factory=QuenchSection)
    grids: GridsSection = field(default_factory=GridsSection)
    otoc: OtocSection = field(default_factory=OtocSection)
    nested: NestedSection = field(default_factory=NestedSection)
    regularization: RegularizationSection = field(default_factory=RegularizationSection)
    output: str = "out"
    workers: int = None

    def to_dict(self):
        return asdict(self)


class ConfigError(ValueError):
    pass


_SECTIONS = {
    "chain": ChainSection,
    "schedule": ScheduleSection,
    "quench": QuenchSection,
    "grids": GridsSection,
    "otoc": OtocSection,
    "nested": NestedSection,
    "regularization": RegularizationSection,
}


def _apply_section(obj, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(data).__name__}")
    known = set(vars(obj))
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"{path}.{key}: unknown key")
        setattr(obj, key, value)


def _positive(path, value, strict=True):
    if value is None:
        return
    if (value <= 0) if strict else (value < 0):
        raise ConfigError(f"{path}: must be {'>' if strict else '>='} 0, got {value}")


def _validate(cfg):
    c = cfg.chain
    if not isinstance(c.L, int) or c.L < 2:
        raise ConfigError(f"chain.L: must be an integer >= 2, got {c.L}")
    _positive("chain.d", c.d)
    if c.frame not in FRAMES:
        raise ConfigError(f"chain.frame: must be one of {FRAMES}, got {c.frame!r}")

    s = cfg.schedule
    _positive("schedule.dt", s.dt)
    _positive("schedule.tau", s.tau)
    _positive("schedule.t_max", s.t_max)
    if s.tau > s.t_max:
        raise ConfigError(f"schedule.tau: must be <= t_max, got {s.tau} > {s.t_max}")
    if s.dt > s.tau:
        raise ConfigError(f"schedule.dt: must be <= tau, got {s.dt} > {s.tau}")

    q = cfg.quench
    _positive("quench.x_h0", q.x_h0, strict=False)
    _positive("quench.x_ht", q.x_ht, strict=False)

    g = cfg.grids
    for name in ("x_h0", "x_ht"):
        vals = getattr(g, name)
        if not isinstance(vals, (list, tuple)) or not vals:
            raise ConfigError(f"grids.{name}: must be a non-empty list")
        for v in vals:
            _positive(f"grids.{name}", v, strict=False)
    if not isinstance(g.L, (list, tuple)) or not g.L:
        raise ConfigError("grids.L: must be a non-empty list")
    for v in g.L:
        if not isinstance(v, int) or v < 2:
            raise ConfigError(f"grids.L: entries must be integers >= 2, got {v}")

    o = cfg.otoc
    if not isinstance(o.x_h, (list, tuple)) or not o.x_h:
        raise ConfigError("otoc.x_h: must be a non-empty list")
    _positive("otoc.dt", o.dt)
    _positive("otoc.t_max", o.t_max)
    if o.offset < 1:
        raise ConfigError(f"otoc.offset: must be >= 1, got {o.offset}")
    if o.site_i is not None and not (0 <= o.site_i < c.L):
        raise ConfigError(f"otoc.site_i: must lie in [0, {c.L}), got {o.site_i}")
    if (o.d_lo is None) != (o.d_hi is None):
        raise ConfigError("otoc.d_lo/d_hi: set both thresholds or neither")
    if o.d_lo is not None and not (0 < o.d_lo < o.d_hi):
        raise ConfigError(f"otoc.d_lo/d_hi: need 0 < d_lo < d_hi, got {o.d_lo}, {o.d_hi}")

    n = cfg.nested
    if not isinstance(n.x_ht, (list, tuple)) or not n.x_ht:
        raise ConfigError("nested.x_ht: must be a non-empty list")
    if n.k_max < 1:
        raise ConfigError(f"nested.k_max: must be >= 1, got {n.k_max}")
    if n.probe_site is not None and not (0 <= n.probe_site < c.L):
        raise ConfigError(f"nested.probe_site: must lie in [0, {c.L}), got {n.probe_site}")

    r = cfg.regularization
    _positive("regularization.t_max", r.t_max)
    if cfg.workers is not None and (not isinstance(cfg.workers, int) or cfg.workers < 1):
        raise ConfigError(f"workers: must be a positive integer, got {cfg.workers}")
    return cfg


def parse_config(path=None, overrides=None):
    """Build a validated ExperimentConfig from a YAML file plus overrides.

    `overrides` maps dotted key paths (e.g. "quench.x_ht") to values; they
    win over file values, which win over defaults.
    """
    cfg = ExperimentConfig()
    if path is not None:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ConfigError("config root: expected a mapping")
        for key, value in data.items():
            if key in _SECTIONS:
                _apply_section(getattr(cfg, key), value, key)
            elif key == "output":
                cfg.output = value
            elif key == "workers":
                cfg.workers = value
            else:
                raise ConfigError(f"{key}: unknown key")
    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        parts = dotted.split(".")
        target = cfg
        for p in parts[:-1]:
            if not hasattr(target, p):
                raise ConfigError(f"{dotted}: unknown key")
            target = getattr(target, p)
        if not hasattr(target, parts[-1]):
            raise ConfigError(f"{dotted}: unknown key")
        setattr(target, parts[-1], value)
    return _validate(cfg)


def dump_config(cfg, path):
    """Round-trippable YAML dump of a config."""
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)
