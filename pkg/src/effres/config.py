"""Run configuration: flat INI-style sections with strict key validation.

A run is described by three sections: [model] (which physical system),
[task] (the parameters of one subcommand), and [output] (emission options).
Unknown keys are rejected with the file line they appear on; presets fill
defaults so that a bare ``--preset`` run works without any file.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(Exception):
    """Invalid configuration; the CLI maps this to exit code 2."""


PRESETS = ("dicke-rwa", "dicke-nonrwa", "dicke-classical", "diamond", "custom")

MODEL_KEYS = {
    "preset", "energies", "mu", "channels", "omega", "n_max", "atoms",
    "omega_atom", "omega_field", "coupling", "euclid_m",
}
TASK_KEYS = {
    "l_max", "samples",
    "grid_start", "grid_stop", "grid_points", "mode", "upper_photons",
    "lower_photons", "state_a", "state_b", "refine", "truncation_check",
    "horizon", "steps", "initial", "target", "steps_per_period",
}
OUTPUT_KEYS = {"plots", "basename"}

MODEL_DEFAULTS = {
    "dicke-rwa": {
        "omega_field": "1.0", "omega_atom": "1.0", "coupling": "0.05",
        "atoms": "1", "n_max": "8",
    },
    "dicke-nonrwa": {
        "omega_field": "1.0", "omega_atom": "3.0", "coupling": "0.02",
        "atoms": "1", "n_max": "14",
    },
    "dicke-classical": {
        "omega_field": "1.0", "omega_atom": "3.0", "coupling": "0.05",
        "atoms": "1", "euclid_m": "40",
    },
    "diamond": {
        "omega": "1.0", "energies": "0.0 0.9 1.1 2.0",
        "channels": "1-2:0.002 1-3:0.0024 2-4:0.0022 3-4:0.0018",
        "mu": "-1 0 0 1", "atoms": "1", "n_max": "6",
    },
}

TASK_DEFAULTS = {"l_max": "2", "samples": "8", "refine": "true",
                 "truncation_check": "true", "steps_per_period": "2000",
                 "steps": "600", "mode": "", "grid_points": "0"}
OUTPUT_DEFAULTS = {"plots": "true", "basename": ""}


@dataclass
class RunConfig:
    """Resolved key-value configuration (all values kept as strings)."""

    model: dict[str, str] = field(default_factory=dict)
    task: dict[str, str] = field(default_factory=dict)
    output: dict[str, str] = field(default_factory=dict)
    source: str = "<defaults>"

    # typed accessors ---------------------------------------------------

    def _get(self, section: dict, key: str, cast, default=None):
        raw = section.get(key, "")
        if raw == "":
            if default is None:
                raise ConfigError(f"{self.source}: missing required key {key!r}")
            return default
        try:
            return cast(raw)
        except ValueError as exc:
            raise ConfigError(f"{self.source}: key {key!r}: {exc}") from exc

    def model_float(self, key: str, default=None) -> float:
        return self._get(self.model, key, float, default)

    def model_int(self, key: str, default=None) -> int:
        return self._get(self.model, key, int, default)

    def model_str(self, key: str, default=None) -> str:
        return self._get(self.model, key, str, default)

    def task_float(self, key: str, default=None) -> float:
        return self._get(self.task, key, float, default)

    def task_int(self, key: str, default=None) -> int:
        return self._get(self.task, key, int, default)

    def task_str(self, key: str, default=None) -> str:
        return self._get(self.task, key, str, default)

    def task_bool(self, key: str, default: bool = False) -> bool:
        raw = self.task.get(key, "")
        if raw == "":
            return default
        return _parse_bool(raw, self.source, key)

    def output_bool(self, key: str, default: bool = False) -> bool:
        raw = self.output.get(key, "")
        if raw == "":
            return default
        return _parse_bool(raw, self.source, key)

    @property
    def preset(self) -> str:
        return self.model.get("preset", "custom")

    def resolved(self) -> dict:
        """Embedded-in-report form; re-running it reproduces the report."""
        return {"model": dict(self.model), "task": dict(self.task),
                "output": dict(self.output)}


def _parse_bool(raw: str, source: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{source}: key {key!r}: not a boolean: {raw!r}")


def _find_line(text: str, section: str, key: str) -> int | None:
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip().lower()
        elif current == section and "=" in stripped:
            if stripped.split("=", 1)[0].strip() == key:
                return lineno
    return None


def load_config(path: str | Path | None, preset: str | None = None) -> RunConfig:
    """Parse and validate a config file, folding in preset defaults.

    ``preset`` (from the command line) overrides the file's model.preset.
    Raises :class:`ConfigError` with a file/line anchor on any problem.
    """
    cfg = RunConfig()
    text = ""
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"{p}: config file not found")
        text = p.read_text(encoding="utf-8")
        cfg.source = str(p)
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text, source=str(p))
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from exc
        known = {"model": MODEL_KEYS, "task": TASK_KEYS, "output": OUTPUT_KEYS}
        for section in parser.sections():
            low = section.lower()
            if low not in known:
                raise ConfigError(f"{p}: unknown section [{section}]")
            for key, value in parser.items(section):
                if key not in known[low]:
                    line = _find_line(text, low, key)
                    anchor = f"{p}:{line}" if line else str(p)
                    raise ConfigError(f"{anchor}: unknown key {key!r} in "
                                      f"section [{section}]")
                getattr(cfg, low)[key] = value.strip()

    if preset is not None:
        cfg.model["preset"] = preset
    name = cfg.model.get("preset", "").strip() or "custom"
    if name not in PRESETS:
        raise ConfigError(f"{cfg.source}: unknown preset {name!r}; choose "
                          f"from {', '.join(PRESETS)}")
    cfg.model["preset"] = name

    for key, value in MODEL_DEFAULTS.get(name, {}).items():
        cfg.model.setdefault(key, value)
    for key, value in TASK_DEFAULTS.items():
        cfg.task.setdefault(key, value)
    for key, value in OUTPUT_DEFAULTS.items():
        cfg.output.setdefault(key, value)
    return cfg


def config_to_ini(resolved: dict) -> str:
    """Render a resolved config back to INI text (round-trip support)."""
    lines = []
    for section in ("model", "task", "output"):
        body = resolved.get(section, {})
        if not body:
            continue
        lines.append(f"[{section}]")
        for key, value in body.items():
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)
