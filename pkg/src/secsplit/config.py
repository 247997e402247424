"""Run configuration: an INI file with one section per subsystem.

Every key has a default, so an empty file is a valid configuration.
Unknown sections or keys are rejected (typos should not silently fall back
to defaults).  Validation runs before any computation and reports the first
violated constraint by name.

Example::

    [orbit]
    L1 = 1.0
    Gamma = 0.3

    [dynamics]
    mu = 0, 1e-4, 3e-4, 1e-3
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from .core import SQRT_3_5, SecularParams, derive_system
from .dynamics.integrator import METHODS, IntegratorConfig
from .errors import ConfigError


@dataclass(frozen=True)
class SystemConfig:
    m0: float = 1.0
    m1: float = 1.0
    m2: float = 1.0
    L2: float = 50.0
    delta: float | None = None
    e2: float | None = None
    octupole_scale: str = "1"


@dataclass(frozen=True)
class OrbitConfig:
    L1: float = 1.0
    Gamma: float = 0.3


@dataclass(frozen=True)
class SeparatrixConfig:
    n_samples: int = 201
    t_factor: float = 10.0
    gamma0: float = 0.0
    random_sets: int = 0


@dataclass(frozen=True)
class MelnikovConfig:
    t_factor: float = 40.0
    tol: float = 1e-8
    quadrature_only: bool = False
    n_potential: int = 32


@dataclass(frozen=True)
class ScanConfig:
    L1_min: float = 0.5
    L1_max: float = 2.0
    n_L1: int = 20
    frac_min: float = 0.02
    frac_max: float = 0.98
    n_frac: int = 20
    margin: float = 1e-3


@dataclass(frozen=True)
class DynamicsConfig:
    mu: tuple = (0.0, 1e-4, 3e-4, 1e-3)
    gamma_ref: float = 0.0
    n_legs: int = 32
    s0: float = 1e-6
    n_grid: int = 256
    transversal_phi: float = 0.0
    method: str = "dop853"
    rtol: float = 1e-12
    atol: float = 1e-14
    step: float = 1e-3
    chart_switch: float = 0.99
    max_steps: int = 500_000
    threshold: float = 0.1
    noise_floor: float = 1e-9
    manifold_resolution: float = 0.02
    manifolds: bool = True


@dataclass(frozen=True)
class PortraitConfig:
    n_g1: int = 121
    n_G1: int = 121
    n_xi: int = 121


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    figures: bool = True


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    separatrix: SeparatrixConfig = field(default_factory=SeparatrixConfig)
    melnikov: MelnikovConfig = field(default_factory=MelnikovConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    portrait: PortraitConfig = field(default_factory=PortraitConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0
    has_scan: bool = False

    # ------------------------------------------------------------ derived
    @property
    def delta(self):
        s = self.system
        if s.delta is not None:
            return s.delta
        if s.e2 is not None:
            return math.sqrt(1.0 - s.e2 ** 2)
        return 0.6

    def params(self, L1=None, Gamma=None):
        s = self.system
        scale = None if s.octupole_scale == "physical" else float(s.octupole_scale)
        return SecularParams(
            L1=float(self.orbit.L1 if L1 is None else L1),
            Gamma=float(self.orbit.Gamma if Gamma is None else Gamma),
            L2=s.L2, delta=self.delta, system=derive_system(s.m0, s.m1, s.m2),
            octupole_scale=scale,
        )

    def integrator(self):
        d = self.dynamics
        return IntegratorConfig(method=d.method, rtol=d.rtol, atol=d.atol, step=d.step,
                                chart_switch=d.chart_switch, max_steps=d.max_steps)

    def canonical(self):
        """Configuration content that determines the outputs (no output location)."""
        d = asdict(self)
        d.pop("output")
        d["dynamics"]["mu"] = list(d["dynamics"]["mu"])
        return d

    @property
    def hash(self):
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_output(self, directory):
        return replace(self, output=replace(self.output, directory=str(directory)))

    def with_seed(self, seed):
        return replace(self, seed=int(seed))

    def with_quadrature_only(self, flag=True):
        return replace(self, melnikov=replace(self.melnikov, quadrature_only=bool(flag)))


_SECTIONS = {
    "system": SystemConfig, "orbit": OrbitConfig, "separatrix": SeparatrixConfig,
    "melnikov": MelnikovConfig, "scan": ScanConfig, "dynamics": DynamicsConfig,
    "portrait": PortraitConfig, "output": OutputConfig,
}


def _convert(section, key, raw, default):
    try:
        if key == "mu":
            vals = tuple(float(v) for v in raw.replace(",", " ").split())
            if not vals:
                raise ValueError("empty list")
            return vals
        if key in ("delta", "e2"):
            return float(raw)
        if key in ("octupole_scale", "method", "directory"):
            return raw.strip()
        if isinstance(default, bool):
            low = raw.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if isinstance(default, int):
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({exc})") from None


def parse_config(text):
    """Parse INI text into a validated :class:`RunConfig`."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    kwargs = {}
    seed = 0
    for name in cp.sections():
        if name == "run":
            for key, raw in cp.items(name):
                if key != "seed":
                    raise ConfigError(f"[run] unknown key {key!r}")
                seed = _convert(name, key, raw, 0)
            continue
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section [{name}]")
        cls = _SECTIONS[name]
        defaults = {f.name: f.default for f in fields(cls)}
        values = {}
        for key, raw in cp.items(name):
            if key not in defaults:
                raise ConfigError(f"[{name}] unknown key {key!r}")
            values[key] = _convert(name, key, raw, defaults[key])
        kwargs[name] = cls(**values)
    cfg = RunConfig(**kwargs, seed=seed, has_scan="scan" in cp.sections())
    validate(cfg)
    return cfg


def load_config(path=None):
    """Load and validate a config file (``None`` gives the defaults)."""
    if path is None:
        cfg = RunConfig()
        validate(cfg)
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    return parse_config(text)


def _require(cond, name, detail):
    if not cond:
        raise ConfigError(f"constraint violated: {name} ({detail})")


def validate(cfg):
    """Raise :class:`ConfigError` naming the first violated constraint."""
    s, o = cfg.system, cfg.orbit
    for m in ("m0", "m1", "m2"):
        _require(getattr(s, m) > 0, f"{m} > 0", f"{m}={getattr(s, m)!r}")
    _require(s.L2 > 0, "L2 > 0", f"L2={s.L2!r}")
    _require(s.delta is None or s.e2 is None, "at most one of delta, e2", "both given")
    if s.delta is not None:
        _require(0 < s.delta < 1, "0 < delta < 1", f"delta={s.delta!r}")
    if s.e2 is not None:
        _require(0 < s.e2 < 1, "0 < e2 < 1", f"e2={s.e2!r}")
    if s.octupole_scale != "physical":
        try:
            v = float(s.octupole_scale)
        except ValueError:
            v = math.nan
        _require(math.isfinite(v), "octupole_scale is a number or 'physical'",
                 f"octupole_scale={s.octupole_scale!r}")
    _require(o.L1 > 0, "L1 > 0", f"L1={o.L1!r}")
    _require(o.Gamma > 0, "Gamma > 0", f"Gamma={o.Gamma!r}")
    _require(o.Gamma < o.L1 * SQRT_3_5, "Gamma < L1*sqrt(3/5)",
             f"Gamma={o.Gamma!r}, bound={o.L1 * SQRT_3_5!r}")
    sp = cfg.separatrix
    _require(sp.n_samples >= 2, "separatrix.n_samples >= 2", f"{sp.n_samples}")
    _require(sp.t_factor > 0, "separatrix.t_factor > 0", f"{sp.t_factor}")
    _require(sp.random_sets >= 0, "separatrix.random_sets >= 0", f"{sp.random_sets}")
    m = cfg.melnikov
    _require(m.t_factor > 0, "melnikov.t_factor > 0", f"{m.t_factor}")
    _require(m.tol > 0, "melnikov.tol > 0", f"{m.tol}")
    _require(m.n_potential >= 4, "melnikov.n_potential >= 4", f"{m.n_potential}")
    g = cfg.scan
    _require(0 < g.L1_min <= g.L1_max, "0 < scan.L1_min <= scan.L1_max",
             f"L1_min={g.L1_min!r}, L1_max={g.L1_max!r}")
    _require(g.n_L1 >= 1 and g.n_frac >= 1, "scan grid sizes >= 1", f"{g.n_L1}x{g.n_frac}")
    _require(0 <= g.margin < 0.5, "0 <= scan.margin < 0.5", f"margin={g.margin!r}")
    _require(g.margin < g.frac_min <= g.frac_max < 1 - g.margin,
             "scan fractions inside (margin, 1 - margin), i.e. Gamma strictly inside "
             "(0, L1*sqrt(3/5))", f"frac_min={g.frac_min!r}, frac_max={g.frac_max!r}")
    d = cfg.dynamics
    _require(all(mu >= 0 for mu in d.mu), "mu >= 0", f"mu={d.mu!r}")
    _require(d.n_legs >= 4, "dynamics.n_legs >= 4", f"{d.n_legs}")
    _require(0 < d.s0 < 1e-2, "0 < dynamics.s0 < 1e-2", f"{d.s0}")
    _require(d.n_grid >= 8, "dynamics.n_grid >= 8", f"{d.n_grid}")
    _require(abs(d.transversal_phi) < math.pi / 4, "|dynamics.transversal_phi| < pi/4",
             f"{d.transversal_phi}")
    _require(d.method in METHODS, f"dynamics.method in {METHODS}", f"{d.method!r}")
    _require(d.rtol > 0 and d.atol > 0 and d.step > 0, "integrator tolerances > 0",
             f"rtol={d.rtol!r}, atol={d.atol!r}, step={d.step!r}")
    _require(0 <= d.chart_switch < 1, "0 <= dynamics.chart_switch < 1", f"{d.chart_switch}")
    _require(d.max_steps >= 1, "dynamics.max_steps >= 1", f"{d.max_steps}")
    _require(d.threshold > 0, "dynamics.threshold > 0", f"{d.threshold}")
    _require(d.noise_floor >= 0, "dynamics.noise_floor >= 0", f"{d.noise_floor}")
    _require(d.manifold_resolution > 0, "dynamics.manifold_resolution > 0",
             f"{d.manifold_resolution}")
    pc = cfg.portrait
    _require(min(pc.n_g1, pc.n_G1, pc.n_xi) >= 3, "portrait grid sizes >= 3",
             f"{pc.n_g1}, {pc.n_G1}, {pc.n_xi}")
    return cfg
