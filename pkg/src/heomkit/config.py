"""
Flat key-value configuration files for the scenario runner.

Grammar (documented in the README): comment lines start with ``#``; a line
``[name]`` opens a section (sections may repeat, e.g. one ``[bath]`` per
reservoir); every other non-empty line is ``key = value [unit]`` where the
optional unit tag is one of ``dimensionless``, ``eV``, ``K``, ``cm^-1`` or
``fs``.  Keys before the first section header are top-level; ``scenario``
is mandatory there.
"""

from dataclasses import dataclass, field

from .units import convert_units

__all__ = ["ConfigValue", "ScenarioConfig", "parse_config", "load_config"]

_UNIT_TAGS = ("dimensionless", "eV", "K", "cm^-1", "fs")


@dataclass(frozen=True)
class ConfigValue:
    value: object
    unit: str = None

    def resolved(self, energy_unit):
        """Numeric value in internal units."""
        if self.unit is None:
            if isinstance(self.value, (int, float)):
                return float(self.value)
            raise ValueError(f"value {self.value!r} is not numeric")
        return convert_units(self.value, self.unit, energy_unit)


@dataclass
class ScenarioConfig:
    scenario: str
    top: dict
    sections: list = field(default_factory=list)
    source: str = ""

    def sections_named(self, name):
        return [data for sec, data in self.sections if sec == name]

    def get(self, key, default=None, section=None):
        table = self.top if section is None else section
        if key not in table:
            if default is not None:
                return default
            raise KeyError(f"missing config key {key!r}")
        return table[key]

    def number(self, key, energy_unit, default=None, section=None):
        value = self.get(key, default=default, section=section)
        if isinstance(value, ConfigValue):
            return value.resolved(energy_unit)
        return float(value)

    def echo(self):
        """Plain-data image of the parsed config for metadata sidecars."""

        def plain(table):
            out = {}
            for key, cv in table.items():
                if isinstance(cv, ConfigValue):
                    out[key] = (
                        cv.value if cv.unit is None else f"{cv.value} {cv.unit}"
                    )
                else:
                    out[key] = cv
            return out

        return {
            "scenario": self.scenario,
            "top": plain(self.top),
            "sections": [[name, plain(data)] for name, data in self.sections],
        }


def _parse_scalar(token):
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def parse_config(text, source=""):
    top = {}
    sections = []
    current = top
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ValueError(f"{source}:{lineno}: empty section name")
            current = {}
            sections.append((name, current))
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key, _, rest = line.partition("=")
        key = key.strip()
        tokens = rest.split()
        if not key or not tokens:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        if len(tokens) == 1:
            current[key] = ConfigValue(_parse_scalar(tokens[0]))
        elif len(tokens) == 2 and tokens[1] in _UNIT_TAGS:
            value = _parse_scalar(tokens[0])
            if not isinstance(value, (int, float)):
                raise ValueError(
                    f"{source}:{lineno}: unit tag on non-numeric value {tokens[0]!r}"
                )
            current[key] = ConfigValue(value, tokens[1])
        else:
            current[key] = ConfigValue(" ".join(tokens))

    if "scenario" not in top:
        raise ValueError(f"{source}: config must set 'scenario'")
    scenario = top.pop("scenario").value
    return ScenarioConfig(scenario=scenario, top=top, sections=sections, source=source)


def load_config(path):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read(), source=str(path))
