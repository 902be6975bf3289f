"""
Run configuration files: ``key = value`` lines under [global], [generate],
[train], [evaluate] and [sweep] headers. Command-line flags override them.
"""
import configparser
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

logger = logging.getLogger(__name__)

SECTIONS = ('global', 'generate', 'train', 'evaluate', 'sweep')


@dataclass
class RunConfig:
    sections: Dict[str, Dict[str, str]] = field(default_factory=dict)
    source: Optional[str] = None

    def section(self, name: str) -> Dict[str, str]:
        """[global] values overlaid by the named section"""
        values = dict(self.sections.get('global', {}))
        values.update(self.sections.get(name, {}))
        return values

    def merged(self, name: str, flags: Dict[str, Any]) -> Dict[str, Any]:
        """File values for ``name`` with every flag that was given on the command line on top"""
        values: Dict[str, Any] = self.section(name)
        values.update({k: v for k, v in flags.items() if v is not None})
        return values

    def to_dict(self) -> Dict:
        return {'source': self.source, 'sections': {k: dict(v) for k, v in self.sections.items()}}


def load_run_config(path: Optional[Union[str, Path]]) -> RunConfig:
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ValueError(f"Config file {path} does not exist")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path)
    except configparser.Error as e:
        raise ValueError(f"Config file {path} is malformed: {e}")
    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ValueError(f"Unknown config sections {unknown} in {path}, expected {list(SECTIONS)}")
    sections = {s: {k.replace('-', '_'): v for k, v in parser.items(s)} for s in parser.sections()}
    logger.debug(f"Loaded run config {path}: {sections}")
    return RunConfig(sections, str(path))


def coerce(values: Dict[str, Any], key: str, kind, default=None, item=int):
    """Typed lookup; strings from the file are converted, flag values pass through"""
    value = values.get(key, default)
    if value is None or not isinstance(value, str):
        return value
    try:
        if kind is bool:
            return value.strip().lower() in ('1', 'true', 'yes', 'on')
        if kind is list:
            return [item(v) for v in value.replace(',', ' ').split()]
        return kind(value)
    except ValueError:
        raise ValueError(f"Config value {key} = '{value}' is not a valid {kind.__name__}")
