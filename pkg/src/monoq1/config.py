"""Flat ``key = value`` run configuration."""
from dataclasses import dataclass

import numpy as np

KEYS = ("problem", "domain", "nx", "ny", "mesh_file", "lambda_policy",
        "c_override", "solver_tol", "output_dir")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: str = "paper-sec6"
    domain: tuple = None
    nx: int = 16
    ny: int = None
    mesh_file: str = None
    lambda_policy: str = "upper"
    c_override: float = None
    solver_tol: float = 1e-12
    output_dir: str = "."

    def __post_init__(self):
        if self.ny is None:
            self.ny = self.nx


def _parse_domain(text):
    text = text.strip()
    vals = []
    for tok in text.replace(",", " ").split():
        tok = tok.strip().lower()
        if tok in ("pi", "+pi"):
            vals.append(np.pi)
        elif tok.endswith("pi"):
            vals.append(float(tok[:-2].rstrip("*")) * np.pi)
        else:
            vals.append(float(tok))
    if len(vals) != 4:
        raise ConfigError(f"domain needs 4 values 'x0 x1 y0 y1', got {text!r}")
    return tuple(vals)


def parse_value(key, value):
    try:
        if key in ("nx", "ny"):
            return int(value)
        if key in ("c_override", "solver_tol"):
            return float(value)
        if key == "domain":
            return _parse_domain(value)
        if key == "lambda_policy":
            if value not in ("upper", "midpoint"):
                raise ConfigError(f"lambda_policy must be 'upper' or 'midpoint', got {value!r}")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def parse_config(text):
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = parse_value(key, value)
    return RunConfig(**values)


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())
