"""Experiment descriptors: JSON files validated against a bundled schema.

A descriptor gathers every parameter block a command might need. Blocks are
optional; asking for one that is absent raises ConfigError naming it.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .basis import BareOpoParams
from .comb import CavityGeometry
from .core import LossBudget, SqueezedState, effective_reservoir
from .errors import ConfigError, DomainError
from .spectrum import CANONICAL, SpectrumConfig, TwoPhotonDamping
from .threshold import DoublyResonantParams, coupling_from_pump

PRESET_PREFIX = "preset:"
DEFAULT_BANDWIDTH = 2e12


def _data_dir():
    return resources.files("squeezelase") / "data"


def load_schema():
    return json.loads((_data_dir() / "descriptor.schema.json").read_text(encoding="utf-8"))


def preset_names():
    presets = _data_dir() / "presets"
    return sorted(p.name[: -len(".json")] for p in presets.iterdir() if p.name.endswith(".json"))


@dataclass(frozen=True)
class Axis:
    """A sampled interval. One point is allowed for grids, not for sweeps."""

    lo: float
    hi: float
    count: int
    spacing: str = "linear"
    variable: str | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"axis count must be >= 1, got {self.count}")
        if self.count > 1 and not self.lo < self.hi:
            raise ConfigError(f"axis needs lo < hi, got lo={self.lo!r} hi={self.hi!r}")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and not self.lo > 0:
            raise ConfigError("log spacing requires lo > 0")

    def values(self):
        if self.count == 1:
            return np.array([float(self.lo)])
        make = np.geomspace if self.spacing == "log" else np.linspace
        out = make(self.lo, self.hi, self.count)
        # pin the endpoints exactly; geomspace can be off in the last bit
        out[0], out[-1] = self.lo, self.hi
        return out


class Descriptor:
    """Validated descriptor content plus builders for the domain objects."""

    def __init__(self, data, source="<memory>"):
        try:
            jsonschema.validate(data, load_schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"descriptor {source}: {where}: {exc.message}") from None
        self.data = copy.deepcopy(data)
        self.source = source

    # -- loading -------------------------------------------------------------

    @classmethod
    def from_text(cls, text, source="<memory>"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"descriptor {source} is not valid JSON: {exc}") from None
        return cls(data, source)

    @classmethod
    def load(cls, ref):
        """Load from a path, a bare preset name, or ``preset:<name>``."""
        ref = str(ref)
        name = ref[len(PRESET_PREFIX):] if ref.startswith(PRESET_PREFIX) else ref
        path = Path(ref)
        if not ref.startswith(PRESET_PREFIX) and path.is_file():
            return cls.from_text(path.read_text(encoding="utf-8"), str(path))
        bundled = _data_dir() / "presets" / f"{name}.json"
        if bundled.is_file():
            return cls.from_text(bundled.read_text(encoding="utf-8"), f"{PRESET_PREFIX}{name}")
        raise ConfigError(f"no descriptor file or preset named {ref!r}")

    # -- identity ------------------------------------------------------------

    @property
    def name(self):
        return self.data["name"]

    @property
    def mode(self):
        return self.data.get("mode", CANONICAL)

    def canonical_json(self):
        return json.dumps(self.data, sort_keys=True, separators=(",", ":"))

    def sha256(self):
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def block(self, key):
        try:
            return self.data[key]
        except KeyError:
            raise ConfigError(f"descriptor {self.name!r} has no {key!r} block") from None

    def has(self, key):
        return key in self.data

    # -- spectrum ------------------------------------------------------------

    def reservoir(self, r=None):
        """Reservoir at OPO2. An explicit ``r`` is taken as already propagated."""
        block = self.block("reservoir")
        theta = block.get("theta", 0.0)
        if r is not None:
            return SqueezedState(r, theta)
        source = SqueezedState(block["r"], theta)
        eta = block.get("propagation_efficiency", 1.0)
        return source if eta == 1.0 else effective_reservoir(source, eta)

    def spectrum_config(self, mode=None, r=None, pump_ratio=None):
        system = self.block("system")
        reservoir = self.reservoir(r)
        kappa = system["kappa"]
        if "g" in system and pump_ratio is None:
            g = system["g"]
        else:
            ratio = pump_ratio if pump_ratio is not None else system.get("pump_ratio")
            if ratio is None:
                raise ConfigError("system block needs either 'g' or 'pump_ratio'")
            g = coupling_from_pump(kappa, ratio, reservoir.r)
        theta_p = system.get("theta_p", reservoir.theta + math.pi)
        damping = None
        if self.has("damping"):
            damping = TwoPhotonDamping(self.data["damping"]["alpha"], self.data["damping"]["r_p"])
        try:
            params = BareOpoParams(g=g, delta_c=system.get("delta_c", 0.0), theta_p=theta_p, kappa=kappa)
            return SpectrumConfig(params, reservoir, mode or self.mode, damping)
        except DomainError as exc:
            raise ConfigError(f"descriptor {self.name!r}: {exc}") from None

    def omega(self):
        return self.block("system").get("omega", 0.0)

    def quadrature(self):
        return self.block("system").get("quadrature", "x")

    # -- other blocks --------------------------------------------------------

    def loss_budget(self):
        b = dict(self.block("budget"))
        b.pop("eta_tot", None)
        if "eta_esc" not in b:
            if "t_coupler" not in b or "l_roundtrip" not in b:
                raise ConfigError("budget needs eta_esc or both t_coupler and l_roundtrip")
            t, l = b.pop("t_coupler"), b.pop("l_roundtrip")
            return LossBudget.from_cavity(t, l, **b)
        return LossBudget(**b)

    def eta_tot(self):
        """The listed total efficiency when given, else the product of the chain."""
        b = self.block("budget")
        return b["eta_tot"] if "eta_tot" in b else self.loss_budget().eta_tot

    def geometries(self):
        block = self.block("geometry")
        out = []
        for cav in block["cavities"]:
            out.append(
                CavityGeometry.from_losses(
                    cav["air_path"],
                    cav.get("crystal_len", 0.0),
                    cav.get("crystal_index", 1.0),
                    cav.get("t_coupler", 0.0),
                    cav.get("l_roundtrip", 0.0),
                )
            )
        return tuple(out)

    def bandwidth(self):
        return self.block("geometry").get("bandwidth_hz", DEFAULT_BANDWIDTH)

    def tolerance(self):
        return self.block("geometry").get("tolerance_hz")

    def doubly_resonant(self):
        return DoublyResonantParams(**self.block("doubly_resonant"))

    def grid(self):
        return Axis(**self.block("grid"))

    def sweep(self):
        axis = Axis(**self.block("sweep"))
        if axis.count < 2:
            raise ConfigError("a sweep needs count >= 2")
        return axis
