from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple

import simplejson

from modules.catalog import FAMILIES, KERNELS, SPACES, TEST_FUNCTIONS
from modules.errors import InputError

DEFAULT_POINTS = tuple((round(0.1 * k, 1),) for k in range(1, 10))


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Settings shared by every CLI command.

    Loaded from an optional JSON file; command-line flags override file values and
    every field has a default, so each command runs without flags.
    """

    kernel: str = "brownian_bridge"
    family: str = "sobolev"
    space: str = "bridge"
    function: str = "sin_pi"
    sigma: float = 1.0
    n: int = 64
    points: Tuple[Tuple[float, ...], ...] = DEFAULT_POINTS
    y: Tuple[float, ...] = (0.5, 0.5)
    truncations: Tuple[int, ...] = (10, 100, 1000, 10000)
    site_counts: Tuple[int, ...] = (4, 8, 16, 32)
    count: int = 10
    onb_n: int = 5
    grid: int = 101
    sites: Optional[str] = None
    tolerance: Optional[float] = None
    out: Optional[str] = None
    diagnostics: Optional[str] = None

    def __post_init__(self):
        for name, registry in (("kernel", KERNELS), ("space", SPACES), ("function", TEST_FUNCTIONS)):
            value = getattr(self, name)
            if value not in registry:
                raise InputError(
                    f"Unknown {name} {value!r}; valid names: {', '.join(sorted(registry))}"
                )
        if self.family not in FAMILIES:
            raise InputError(f"Unknown family {self.family!r}; valid names: {', '.join(FAMILIES)}")
        if not self.sigma > 0:
            raise InputError("sigma must be positive")
        object.__setattr__(self, "points", tuple(tuple(float(c) for c in p) for p in self.points))
        object.__setattr__(self, "y", tuple(float(c) for c in self.y))
        object.__setattr__(self, "truncations", tuple(int(t) for t in self.truncations))
        object.__setattr__(self, "site_counts", tuple(int(t) for t in self.site_counts))

    def params(self) -> dict:
        """Parameters echoed into the diagnostics block."""
        return {f.name: getattr(self, f.name) for f in fields(self)
                if f.name not in ("out", "diagnostics")}

    def override(self, **flags) -> "ExperimentConfig":
        """Return a copy with every flag that was actually given (not None) applied."""
        given = {k: v for k, v in flags.items() if v is not None and v != ()}
        return replace(self, **given)


def _normalize_points(raw):
    return tuple(tuple(p) if isinstance(p, (list, tuple)) else (p,) for p in raw)


def load_config(path: Optional[str]) -> ExperimentConfig:
    """Read an ExperimentConfig from JSON; a missing path gives the defaults."""
    if path is None:
        return ExperimentConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = simplejson.load(fh)
    except (OSError, simplejson.JSONDecodeError) as exc:
        raise InputError(f"Cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("Config file must hold a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InputError(f"Unknown config keys {unknown}; valid keys: {', '.join(sorted(known))}")
    if "points" in data:
        data["points"] = _normalize_points(data["points"])
    try:
        return ExperimentConfig(**data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"Invalid config value: {exc}") from exc
