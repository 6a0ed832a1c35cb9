from typing import Any, Dict, List, Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
import json

from ..version import __version__
from ..errors import ConfigError
from .formats import dumps_json, write_text


SECTIONS = ('config', 'sweep', 'scaling', 'verify')
MANIFEST_KEYS = ('command', 'master_seed', 'version', 'timestamp', 'outputs')


def load_document(path:str) -> Dict[str, Any]:
    '''Read a configuration document; a RunManifest is accepted as well.'''

    try:
        with open(path, encoding='utf-8') as f:
            document = json.load(f)
    except OSError as e:
        raise ConfigError('config', f'cannot read `{path}`: {e.strerror}')
    except json.JSONDecodeError as e:
        raise ConfigError('config', f'`{path}` is not valid JSON ({e.msg}, line {e.lineno})')

    if not isinstance(document, dict):
        raise ConfigError('config', 'the document must be a JSON object')
    for key, value in document.items():
        if key in MANIFEST_KEYS: continue
        if key not in SECTIONS:
            raise ConfigError(key, f'unknown section, expected one of {list(SECTIONS)}')
        if not isinstance(value, dict):
            raise ConfigError(key, 'section must be a JSON object')
    return document


@dataclass
class RunManifest:
    command:     str
    config:      Dict[str, Any]
    master_seed: int
    sections:    Dict[str, Any]=field(default_factory=dict)
    version:     str=__version__
    timestamp:   str=field(default_factory=lambda:
        datetime.now(timezone.utc).isoformat(timespec='seconds'))
    outputs:     List[str]=field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        data = dict(
            command=self.command,
            config=self.config,
            master_seed=self.master_seed,
            version=self.version,
            timestamp=self.timestamp,
            outputs=self.outputs,
        )
        data.update(self.sections)
        return data

    @classmethod
    def from_dict(cls, data:Mapping[str, Any]) -> 'RunManifest':
        data = dict(data)
        return cls(
            command=data.pop('command'),
            config=data.pop('config'),
            master_seed=data.pop('master_seed'),
            version=data.pop('version', __version__),
            timestamp=data.pop('timestamp'),
            outputs=data.pop('outputs', []),
            sections={k: v for k, v in data.items() if k in SECTIONS},
        )

    @staticmethod
    def path_for(output:str) -> str:
        return output + '.manifest.json'

    def write(self, output:str) -> str:
        path = self.path_for(output)
        write_text(path, dumps_json(self.to_dict()))
        return path
