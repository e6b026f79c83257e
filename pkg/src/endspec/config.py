"""Run configuration: YAML schema, strict validation, canonical hashing.

Top-level sections: model, numerics, task, output.  Unknown keys anywhere
are rejected.  The full schema with defaults is documented in the README;
`canonical()` serializes the validated config deterministically, and its
hash stamps every artifact the CLI writes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from pathlib import Path

import yaml

from .errors import ConfigError
from .modes import bump_profile, warped_product_potential
from .potentials import RadialPotential, barrier, smooth_bump, square_well, tabulated, zero_potential
from .scaling import THETA_DEFAULT, THETA_SWEEP_DEFAULT
from .spectral_core import CrossSectionSpectrum, make_cross_section

__all__ = ["RunConfig", "load_config", "build_cross_section", "build_potential", "build_potential_map"]

_CROSS_KINDS = ("circle", "point", "dirichlet-interval", "list")
_COMMANDS = ("spectrum", "resonances", "essential-spectrum", "continue",
             "parametrix-check", "lap", "corner", "oracle")


def _require_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _complex_pair(value, where: str) -> complex:
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict):
        _require_keys(value, {"re", "im"}, where)
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    raise ConfigError(f"{where}: expected number, [re, im] pair, or {{re, im}} mapping")


@dataclass
class ModelSection:
    kind: str = "cylinder"           # cylinder | cusp | corner
    cross_section: dict = field(default_factory=lambda: {"kind": "point"})
    e_max: float = 10.0
    potentials: list = field(default_factory=list)
    profile: dict | None = None
    dimension: int = 2
    ends: list = field(default_factory=list)      # corner: up to two potential specs
    coupling: dict | None = None


@dataclass
class NumericsSection:
    L: float = 16.0
    n: int = 1067
    scheme: str = "fd2"
    L2d: float = 8.0
    n2d: int = 48
    scaling_radius: float | None = None
    theta: complex = THETA_DEFAULT
    theta_sweep: tuple = THETA_SWEEP_DEFAULT
    rays_tolerance: float = 0.02
    stability_tolerance: float = 1e-6
    residual_bound: float = 1e-10
    richardson: bool = True
    e_grid: tuple = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


@dataclass
class TaskSection:
    command: str = "spectrum"
    options: dict = field(default_factory=dict)


@dataclass
class OutputSection:
    directory: str = "out"
    formats: tuple = ("csv", "svg")


@dataclass
class RunConfig:
    model: ModelSection
    numerics: NumericsSection
    task: TaskSection
    output: OutputSection
    source_text: str = ""

    def canonical(self) -> str:
        data = {
            "model": asdict(self.model),
            "numerics": {**asdict(self.numerics),
                         "theta": [self.numerics.theta.real, self.numerics.theta.imag],
                         "theta_sweep": [[t.real, t.imag] for t in self.numerics.theta_sweep]},
            "task": asdict(self.task),
            "output": asdict(self.output),
        }
        return yaml.safe_dump(data, sort_keys=True, default_flow_style=True)


def _parse_model(raw: dict) -> ModelSection:
    _require_keys(raw, {"kind", "cross_section", "e_max", "potentials", "profile",
                        "dimension", "ends", "coupling"}, "model")
    m = ModelSection()
    m.kind = raw.get("kind", m.kind)
    if m.kind not in ("cylinder", "cusp", "corner"):
        raise ConfigError(f"model.kind must be cylinder|cusp|corner, got {m.kind!r}")
    cs = raw.get("cross_section", {"kind": "point"})
    _require_keys(cs, {"kind", "radius", "length", "values"}, "model.cross_section")
    if cs.get("kind") not in _CROSS_KINDS:
        raise ConfigError(f"cross_section.kind must be one of {_CROSS_KINDS}")
    m.cross_section = cs
    m.e_max = float(raw.get("e_max", m.e_max))
    m.potentials = raw.get("potentials", []) or []
    for spec in m.potentials:
        _validate_potential_spec(spec)
    m.profile = raw.get("profile")
    if m.profile is not None:
        _require_keys(m.profile, {"type", "base_radius", "amplitude", "left", "right"}, "model.profile")
    m.dimension = int(raw.get("dimension", m.dimension))
    m.ends = raw.get("ends", []) or []
    if len(m.ends) > 2:
        raise ConfigError("model.ends takes at most two potential specs")
    for spec in m.ends:
        _validate_potential_spec(spec)
    m.coupling = raw.get("coupling")
    if m.coupling is not None:
        _require_keys(m.coupling, {"type", "strength", "size"}, "model.coupling")
        if m.coupling.get("type", "box") != "box":
            raise ConfigError("only box couplings are supported")
    return m


def _validate_potential_spec(spec: dict) -> None:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"potential spec must be a mapping with a 'type': {spec!r}")
    t = spec["type"]
    allowed = {
        "well": {"type", "mode", "depth", "width"},
        "barrier": {"type", "mode", "height", "left", "right"},
        "bump": {"type", "mode", "amplitude", "left", "right"},
        "table": {"type", "mode", "path"},
        "zero": {"type", "mode"},
    }
    if t not in allowed:
        raise ConfigError(f"unknown potential type {t!r}")
    _require_keys(spec, allowed[t], f"potential[{t}]")


def _parse_numerics(raw: dict) -> NumericsSection:
    allowed = {"grid", "grid2d", "scaling_radius", "theta", "theta_sweep", "rays_tolerance",
               "stability_tolerance", "residual_bound", "richardson", "epsilon_grid"}
    _require_keys(raw, allowed, "numerics")
    n = NumericsSection()
    g = raw.get("grid", {})
    _require_keys(g, {"L", "n", "scheme"}, "numerics.grid")
    n.L = float(g.get("L", n.L))
    n.n = int(g.get("n", n.n))
    n.scheme = g.get("scheme", n.scheme)
    if n.scheme not in ("fd2", "fd4"):
        raise ConfigError("numerics.grid.scheme must be fd2 or fd4")
    g2 = raw.get("grid2d", {})
    _require_keys(g2, {"L", "n"}, "numerics.grid2d")
    n.L2d = float(g2.get("L", n.L2d))
    n.n2d = int(g2.get("n", n.n2d))
    if "scaling_radius" in raw:
        n.scaling_radius = float(raw["scaling_radius"])
    n.theta = _complex_pair(raw.get("theta", n.theta), "numerics.theta")
    if "theta_sweep" in raw:
        n.theta_sweep = tuple(_complex_pair(t, "numerics.theta_sweep") for t in raw["theta_sweep"])
    n.rays_tolerance = float(raw.get("rays_tolerance", n.rays_tolerance))
    n.stability_tolerance = float(raw.get("stability_tolerance", n.stability_tolerance))
    n.residual_bound = float(raw.get("residual_bound", n.residual_bound))
    n.richardson = bool(raw.get("richardson", n.richardson))
    if "epsilon_grid" in raw:
        n.e_grid = tuple(float(e) for e in raw["epsilon_grid"])
    return n


def _parse_task(raw: dict) -> TaskSection:
    _require_keys(raw, {"command", "options"}, "task")
    t = TaskSection()
    t.command = raw.get("command", t.command)
    if t.command not in _COMMANDS:
        raise ConfigError(f"task.command must be one of {_COMMANDS}, got {t.command!r}")
    t.options = raw.get("options", {}) or {}
    return t


def _parse_output(raw: dict) -> OutputSection:
    _require_keys(raw, {"directory", "formats"}, "output")
    o = OutputSection()
    o.directory = raw.get("directory", o.directory)
    fmts = raw.get("formats", list(o.formats))
    bad = set(fmts) - {"csv", "svg"}
    if bad:
        raise ConfigError(f"unknown output formats {sorted(bad)}")
    o.formats = tuple(fmts)
    return o


def load_config(path) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    _require_keys(raw, {"model", "numerics", "task", "output"}, "config")
    cfg = RunConfig(
        model=_parse_model(raw.get("model", {}) or {}),
        numerics=_parse_numerics(raw.get("numerics", {}) or {}),
        task=_parse_task(raw.get("task", {}) or {}),
        output=_parse_output(raw.get("output", {}) or {}),
        source_text=text,
    )
    return cfg


def build_cross_section(cs: dict, e_max: float) -> CrossSectionSpectrum:
    kind = cs["kind"]
    if kind == "circle":
        return make_cross_section("circle", float(cs.get("radius", 1.0)), e_max)
    if kind == "point":
        return make_cross_section("point")
    if kind == "dirichlet-interval":
        return make_cross_section("dirichlet-interval", float(cs.get("length", 3.141592653589793)), e_max)
    return make_cross_section("list", cs.get("values", [0.0]), e_max)


def build_potential(spec: dict | None) -> RadialPotential:
    if spec is None:
        return zero_potential
    t = spec["type"]
    if t == "zero":
        return zero_potential
    if t == "well":
        return square_well(float(spec.get("depth", 5.0)), float(spec.get("width", 1.0)))
    if t == "barrier":
        return barrier(float(spec.get("height", 8.0)), float(spec.get("left", 1.0)),
                       float(spec.get("right", 2.0)))
    if t == "bump":
        return smooth_bump(float(spec.get("amplitude", 1.0)), float(spec.get("left", 0.0)),
                           float(spec.get("right", 2.0)))
    if t == "table":
        return tabulated(spec["path"])
    raise ConfigError(f"unknown potential type {t!r}")


def build_potential_map(model: ModelSection) -> dict[int, RadialPotential]:
    """Per-mode potentials: explicit specs win; a warped profile fills the rest."""
    out: dict[int, RadialPotential] = {}
    if model.profile is not None:
        prof = bump_profile(
            float(model.profile.get("base_radius", 1.0)),
            float(model.profile.get("amplitude", 0.3)),
            float(model.profile.get("left", 0.0)),
            float(model.profile.get("right", 2.0)),
        )
        cs = build_cross_section(model.cross_section, model.e_max)
        for idx, mu in enumerate(cs.thresholds(model.e_max)):
            k = round(mu ** 0.5 * float(model.profile.get("base_radius", 1.0)))
            out[idx] = warped_product_potential(prof, k)
    for spec in model.potentials:
        idx = int(spec.get("mode", 0))
        out[idx] = build_potential(spec)
    return out
