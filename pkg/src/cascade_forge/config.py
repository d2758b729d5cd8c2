"""Run configuration: a flat ``key = value`` text file.

Recognised keys (all optional except ``B`` and ``A1``)::

    B                       Hénon coefficient (nonzero)
    A1                      horseshoe parameter
    A0                      low end of the parameter window; defaults to one
                            below the closed-form no-orbit threshold
    perturbation.name       none | bounded-wave | compact-bump
    perturbation.magnitude  size of the perturbation
    perturbation.r          support radius of compact-bump / radius r of the class
    perturbation.delta      declared C^1 bound of alpha outside radius r
    tolerances.newton       Newton residual tolerance
    tolerances.bifurcation  event localisation tolerance in A
    tolerances.point        point-identity tolerance
    limits.kmax             largest period in censuses (<= 24)
    limits.depth            period-doublings followed per cascade
    limits.grid             grid resolution of certification checks
    out                     output directory

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

from .errors import ConfigError
from .family import FamilySpec, geometry_for
from .symbolic import ENUMERATION_CAP

__all__ = ["RunConfig", "parse_config", "load_config", "MAX_DEPTH", "MAX_GRID"]

MAX_DEPTH = 8
MAX_GRID = 4000

_KEYS = {
    "B": ("B", float),
    "A1": ("A1", float),
    "A0": ("A0", float),
    "perturbation.name": ("perturbation", str),
    "perturbation.magnitude": ("magnitude", float),
    "perturbation.r": ("r", float),
    "perturbation.delta": ("delta", float),
    "tolerances.newton": ("tol_newton", float),
    "tolerances.bifurcation": ("tol_bifurcation", float),
    "tolerances.point": ("tol_point", float),
    "limits.kmax": ("kmax", int),
    "limits.depth": ("depth", int),
    "limits.grid": ("grid", int),
    "out": ("out", str),
}


@dataclass(frozen=True)
class RunConfig:
    B: float
    A1: float
    A0: float = None
    perturbation: str = "none"
    magnitude: float = 0.0
    r: float = 1.0
    delta: float = 1e-3
    tol_newton: float = 1e-10
    tol_bifurcation: float = 1e-8
    tol_point: float = 1e-7
    kmax: int = 8
    depth: int = 5
    grid: int = 400
    out: str = "results"

    def __post_init__(self):
        if self.B == 0:
            raise ConfigError("B must be nonzero")
        if not self.A1 > 0:
            raise ConfigError("window requires A1 > 0")
        if self.A0 is not None and not self.A0 < 0:
            raise ConfigError("window requires A0 < 0")
        for name in ("tol_newton", "tol_bifurcation", "tol_point", "r", "delta"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 <= self.kmax <= ENUMERATION_CAP:
            raise ConfigError(f"limits.kmax must lie in 0..{ENUMERATION_CAP}")
        if not 0 <= self.depth <= MAX_DEPTH:
            raise ConfigError(f"limits.depth must lie in 0..{MAX_DEPTH}")
        if not 2 <= self.grid <= MAX_GRID:
            raise ConfigError(f"limits.grid must lie in 2..{MAX_GRID}")

    def family(self):
        return FamilySpec.from_builtin(self.B, self.perturbation, self.magnitude, self.r, delta=self.delta)

    def window(self, spec=None):
        """``(A0, A1)``, filling A0 from the closed-form threshold when unset."""
        if self.A0 is not None:
            return self.A0, self.A1
        spec = spec or self.family()
        geo = geometry_for(spec, self.A1)
        return -(spec.beta + (abs(spec.B) + 1) * geo.Q + spec.beta**2 / 4) - 1.0, self.A1

    def dumps(self):
        lines = []
        for key, (attr, _) in _KEYS.items():
            value = getattr(self, attr)
            if value is not None:
                lines.append(f"{key} = {value!r}" if not isinstance(value, str) else f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def digest(self):
        """Hash of the computational settings (the output directory is excluded)."""
        body = "".join(line + "\n" for line in self.dumps().splitlines() if not line.startswith("out ="))
        return hashlib.sha256(body.encode()).hexdigest()


def parse_config(text, **overrides):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        attr, kind = _KEYS[key]
        try:
            values[attr] = kind(value) if kind is not int else int(float(value))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    values.update({k: v for k, v in overrides.items() if v is not None})
    missing = [k for k in ("B", "A1") if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    known = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in values.items() if k in known})


def load_config(path, **overrides):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), **overrides)
