"""Flat ``section.key = value`` run configuration.

A config file holds one assignment per line.  Blank lines and lines starting
with ``#`` are ignored, unknown keys are rejected and a key may appear at
most once per file.  Values given with ``--set`` on the command line
override the file.  The default output directory is read from
``FRAQDYN_OUTPUT_DIR`` when set.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Dict, Iterable, Optional, Tuple

from .dynamics import AttractorConfig
from .equilibria import equilibria_2d, equilibrium_3d
from .errors import ConfigError, DomainError
from .fracsolve import SolverConfig
from .hrmodels import HR2DParams, HR3DParams, resting_x0

__all__ = [
    "ModelSection",
    "SolverSection",
    "AnalysisSection",
    "OutputSection",
    "RunConfig",
    "OUTPUT_DIR_ENV",
    "FORMAT_VERSION",
    "parse_config",
    "parse_config_text",
    "render_config",
    "with_overrides",
]

OUTPUT_DIR_ENV = "FRAQDYN_OUTPUT_DIR"
FORMAT_VERSION = "1"


def _positive(v):
    return None if v > 0.0 else "must be > 0"


def _order(v):
    return None if 0.0 < v <= 1.0 else "must lie in (0, 1]"


def _unit_open(v):
    return None if 0.0 < v < 1.0 else "must lie in (0, 1)"


def _fraction(v):
    return None if 0.0 <= v < 1.0 else "must lie in [0, 1)"


def _at_least(n):
    def check(v):
        return None if v >= n else f"must be >= {n}"

    return check


def _key(default, kind, check=None, doc=""):
    return field(default=default, metadata={"kind": kind, "check": check, "doc": doc})


@dataclass(frozen=True)
class ModelSection:
    a: float = _key(1.0, "float", _positive)
    b: float = _key(3.0, "float", _positive)
    c: float = _key(1.0, "float", _positive)
    d: float = _key(5.0, "float", _positive)
    I: float = _key(0.0, "float")
    eps: Optional[float] = _key(None, "float?", _unit_open, "set together with s for the 3D system")
    s: Optional[float] = _key(None, "float?", _positive, "set together with eps for the 3D system")


@dataclass(frozen=True)
class SolverSection:
    q: float = _key(0.8, "float", _order)
    step: float = _key(5e-3, "float", _positive)
    horizon: float = _key(400.0, "float", _positive)
    corrector_iterations: int = _key(1, "int", _at_least(1))
    memory_window: Optional[int] = _key(None, "int?", _at_least(1))
    init: str = _key("resting", "str", None, "resting | equilibrium | comma-separated state")
    perturbation: float = _key(0.0, "float", None, "added to the x component of init")


@dataclass(frozen=True)
class AnalysisSection:
    transient_fraction: float = _key(0.5, "float", _fraction)
    amplitude_tolerance: float = _key(1e-3, "float", _positive)
    state_tolerance: float = _key(1e-2, "float", _positive)
    window_count: int = _key(4, "int", _at_least(1))
    threshold: float = _key(0.0, "float")
    min_separation: Optional[float] = _key(None, "float?", _positive)
    gap_factor: float = _key(3.0, "float", _positive)
    r_lo: Optional[float] = _key(None, "float?")
    r_hi: Optional[float] = _key(None, "float?")
    n_points: int = _key(1000, "int", _at_least(1))
    I_lo: Optional[float] = _key(None, "float?", None, "region default 0, regimes default band edge")
    I_hi: Optional[float] = _key(None, "float?", None, "region default 30, regimes default band edge")
    q_lo: float = _key(0.01, "float", _order)
    q_hi: float = _key(1.0, "float", _order)
    nI: int = _key(500, "int", _at_least(1))
    nq: int = _key(500, "int", _at_least(1))
    scan_points: int = _key(2000, "int", _at_least(2))
    boundary_tol: float = _key(1e-8, "float", _positive)


@dataclass(frozen=True)
class OutputSection:
    directory: str = _key(".", "str", None, f"default from ${OUTPUT_DIR_ENV}")
    format_version: str = _key(FORMAT_VERSION, "str")


_SECTIONS = {
    "model": ModelSection,
    "solver": SolverSection,
    "analysis": AnalysisSection,
    "output": OutputSection,
}


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    solver: SolverSection = field(default_factory=SolverSection)
    analysis: AnalysisSection = field(default_factory=AnalysisSection)
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self):
        m = self.model
        if (m.eps is None) != (m.s is None):
            raise ConfigError("model.eps and model.s must be given together (both enable 3D mode)")
        self.base_params()
        if self.is_3d:
            self.params_3d()
        self.solver_config()
        self.attractor_config()
        if self.analysis.q_lo > self.analysis.q_hi:
            raise ConfigError(
                f"analysis.q_lo = {self.analysis.q_lo!r} exceeds analysis.q_hi = {self.analysis.q_hi!r}"
            )

    @property
    def is_3d(self) -> bool:
        return self.model.eps is not None

    @property
    def dimension(self) -> int:
        return 3 if self.is_3d else 2

    def base_params(self) -> HR2DParams:
        m = self.model
        try:
            return HR2DParams(a=m.a, b=m.b, c=m.c, d=m.d, I=m.I)
        except DomainError as exc:
            raise ConfigError(f"model: {exc}") from exc

    def params_3d(self) -> HR3DParams:
        if not self.is_3d:
            raise ConfigError("this command needs the 3D system: set model.eps and model.s")
        try:
            return HR3DParams(base=self.base_params(), eps=self.model.eps, s=self.model.s)
        except DomainError as exc:
            raise ConfigError(f"model: {exc}") from exc

    def params(self):
        return self.params_3d() if self.is_3d else self.base_params()

    def solver_config(self) -> SolverConfig:
        s = self.solver
        try:
            return SolverConfig(
                q=s.q,
                step=s.step,
                horizon=s.horizon,
                corrector_iterations=s.corrector_iterations,
                memory_window=s.memory_window,
            )
        except DomainError as exc:
            raise ConfigError(f"solver: {exc}") from exc

    def attractor_config(self) -> AttractorConfig:
        a = self.analysis
        try:
            return AttractorConfig(
                transient_fraction=a.transient_fraction,
                amplitude_tolerance=a.amplitude_tolerance,
                state_tolerance=a.state_tolerance,
                window_count=a.window_count,
                threshold=a.threshold,
                min_separation=a.min_separation,
                gap_factor=a.gap_factor,
            )
        except DomainError as exc:
            raise ConfigError(f"analysis: {exc}") from exc

    def initial_state(self) -> Tuple[float, ...]:
        """Resolve ``solver.init`` into a state vector.

        ``resting`` is the leftmost fast-subsystem equilibrium at zero
        stimulus (with ``z = 0`` in 3D).  ``equilibrium`` is the rightmost
        equilibrium at the configured stimulus (2D) or the unique one (3D).
        """
        choice = self.solver.init.strip().lower()
        if choice == "resting":
            base = self.base_params().with_stimulus(0.0)
            x = resting_x0(base)
            state = [x, base.c - base.d * x * x] + ([0.0] if self.is_3d else [])
        elif choice == "equilibrium":
            if self.is_3d:
                state = list(equilibrium_3d(self.params_3d()).state)
            else:
                state = list(equilibria_2d(self.base_params())[-1].state)
        else:
            try:
                state = [float(v) for v in choice.split(",")]
            except ValueError:
                raise ConfigError(
                    f"solver.init = {self.solver.init!r}: expected resting, equilibrium "
                    "or a comma-separated list of numbers"
                ) from None
            if len(state) != self.dimension or not all(math.isfinite(v) for v in state):
                raise ConfigError(
                    f"solver.init = {self.solver.init!r}: need {self.dimension} finite values"
                )
        state[0] += self.solver.perturbation
        return tuple(state)


def _convert(section: str, name: str, kind: str, text: str, check):
    key = f"{section}.{name}"
    optional = kind.endswith("?")
    base = kind.rstrip("?")
    raw = text.strip()
    if optional and raw.lower() in ("", "none"):
        return None
    if base == "str":
        value = raw
    elif base == "int":
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"{key} = {raw!r}: expected an integer") from None
    else:
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"{key} = {raw!r}: expected a number") from None
        if not math.isfinite(value):
            raise ConfigError(f"{key} = {raw!r}: must be finite")
    if check is not None:
        problem = check(value)
        if problem:
            raise ConfigError(f"{key} = {raw!r}: {problem}")
    return value


def _split_assignment(line: str, where: str):
    if "=" not in line:
        raise ConfigError(f"{where}: expected 'section.key = value', got {line!r}")
    lhs, rhs = line.split("=", 1)
    lhs = lhs.strip()
    if lhs.count(".") != 1:
        raise ConfigError(f"{where}: key {lhs!r} must have the form section.key")
    section, name = lhs.split(".")
    return section, name, rhs.strip()


def _field_map(section: str):
    cls = _SECTIONS.get(section)
    if cls is None:
        raise ConfigError(f"unknown section {section!r}; expected one of {sorted(_SECTIONS)}")
    return {f.name: f for f in fields(cls)}


def _assignments(text: str, source: str):
    seen = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        where = f"{source}:{lineno}"
        section, name, value = _split_assignment(stripped, where)
        full = f"{section}.{name}"
        if full in seen:
            raise ConfigError(f"{where}: {full} already set on line {seen[full]}")
        seen[full] = lineno
        yield section, name, value


def parse_config_text(
    text: str = "",
    overrides: Iterable[str] = (),
    source: str = "<config>",
    env: Optional[Dict[str, str]] = None,
) -> RunConfig:
    """Build a :class:`RunConfig` from config text plus ``section.key=value`` overrides."""
    env = os.environ if env is None else env
    values: Dict[str, Dict[str, object]] = {s: {} for s in _SECTIONS}
    if env.get(OUTPUT_DIR_ENV):
        values["output"]["directory"] = env[OUTPUT_DIR_ENV]

    def assign(section, name, raw):
        fmap = _field_map(section)
        if name not in fmap:
            raise ConfigError(f"unknown key {section}.{name}; {section} accepts {sorted(fmap)}")
        meta = fmap[name].metadata
        values[section][name] = _convert(section, name, meta["kind"], raw, meta["check"])

    for section, name, raw in _assignments(text, source):
        assign(section, name, raw)
    for item in overrides:
        section, name, raw = _split_assignment(item, "--set")
        assign(section, name, raw)

    sections = {s: _SECTIONS[s](**v) for s, v in values.items()}
    return RunConfig(**sections)


def parse_config(
    path: Optional[str] = None,
    overrides: Iterable[str] = (),
    env: Optional[Dict[str, str]] = None,
) -> RunConfig:
    """Read ``path`` (optional) and apply ``overrides``."""
    text = ""
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc.strerror or exc}") from exc
    return parse_config_text(text, overrides, source=path or "<config>", env=env)


def _render_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(cfg: RunConfig, header: Iterable[str] = ()) -> str:
    """Serialise every resolved key; the result parses back to ``cfg``."""
    lines = [f"# {h}" for h in header]
    for section in _SECTIONS:
        obj = getattr(cfg, section)
        for f in fields(obj):
            lines.append(f"{section}.{f.name} = {_render_value(getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: RunConfig, **sections) -> RunConfig:
    """Copy of ``cfg`` with per-section field updates, e.g. ``solver={"q": 0.9}``."""
    updates = {name: replace(getattr(cfg, name), **vals) for name, vals in sections.items()}
    return replace(cfg, **updates)
