"""JSON reports and set files.

Reports are written with 4-space indentation in key order. Interval sets
embedded in a report are streamed one component per line, so avoidance
sets with 10^5 components never pass through one big string.
"""

from typing import IO, Any, Dict
import json
import logging

from config.config import Config
from config.errors import InputError, ParseError
from core.interval_set import IntervalSet, dump

logger = logging.getLogger(__name__)

INDENT = 4


def to_jsonable(value: Any) -> Any:
    """Replace embedded IntervalSets by their dict form."""
    if isinstance(value, IntervalSet):
        return value.to_dict()
    if isinstance(value, dict):
        return {key: to_jsonable(item) for key, item in value.items()}
    if isinstance(value, list):
        return [to_jsonable(item) for item in value]
    return value


def _write_value(fp: IO[str], value: Any, level: int) -> None:
    pad = ' ' * (INDENT * level)
    if isinstance(value, IntervalSet):
        fp.write('{"components": [')
        for i, (lo, hi) in enumerate(value.to_dict()['components']):
            fp.write(',' if i else '')
            fp.write(f"\n{pad}{' ' * INDENT}{json.dumps([lo, hi])}")
        fp.write(f"\n{pad}]}}" if value else ']}')
    elif isinstance(value, dict) and value:
        fp.write('{')
        for i, (key, item) in enumerate(value.items()):
            fp.write(',' if i else '')
            fp.write(f"\n{pad}{' ' * INDENT}{json.dumps(key)}: ")
            _write_value(fp, item, level + 1)
        fp.write(f"\n{pad}}}")
    else:
        text = json.dumps(value, indent=INDENT)
        fp.write(text.replace('\n', '\n' + pad))


def write_report(path: str, payload: Dict[str, Any]) -> None:
    """Write a versioned report; embedded sets are streamed."""
    document = {'schema_version': Config.SCHEMA_VERSION}
    document.update(payload)
    try:
        with open(path, 'w', encoding='utf-8') as f:
            _write_value(f, document, 0)
            f.write('\n')
    except OSError as e:
        raise InputError('io_error', path=path, detail=e.strerror or str(e))
    logger.info("Report written to %s", path)


def read_report(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise InputError('io_error', path=path, detail=e.strerror or str(e))
    except json.JSONDecodeError as e:
        raise ParseError(what=path, detail=str(e))
    if not isinstance(data, dict):
        raise ParseError(what=path, detail="a report must be a JSON object")
    version = data.get('schema_version')
    if version is not None and version != Config.SCHEMA_VERSION:
        raise ParseError(what=path, detail=f"unsupported schema_version {version}")
    return data


def write_set(path: str, s: IntervalSet) -> None:
    try:
        with open(path, 'w', encoding='utf-8') as f:
            dump(s, f)
    except OSError as e:
        raise InputError('io_error', path=path, detail=e.strerror or str(e))


def read_set(path: str) -> IntervalSet:
    """Read a set file, or the embedded "set" of a report."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise InputError('io_error', path=path, detail=e.strerror or str(e))
    except json.JSONDecodeError as e:
        raise ParseError(what=path, detail=str(e))
    if isinstance(data, dict) and 'components' not in data and isinstance(data.get('set'), dict):
        data = data['set']
    return IntervalSet.from_dict(data)
