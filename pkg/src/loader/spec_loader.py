# ------ src/loader/spec_loader.py ------

import hashlib
import json
import logging
import os

from pydantic import TypeAdapter, ValidationError

from src.dynsys.spec import SystemSpec
from src.errors import InputError, ParseError, SchemaError, UnknownState

logger = logging.getLogger(__name__)

SPEC_ADAPTER = TypeAdapter(SystemSpec)


def _schema_error(exc):
    """Turn the first pydantic error into a SchemaError, or re-raise a wrapped input error."""
    for error in exc.errors():
        wrapped = error.get('ctx', {}).get('error')
        if isinstance(wrapped, InputError):
            return wrapped
    first = exc.errors()[0]
    location = '.'.join(str(part) for part in first['loc'])
    return SchemaError(first['msg'], location or None)


def parse_spec(text):
    """
    Validate a system description given as JSON text.

    Args:
        text (str): JSON document

    Returns:
        FiniteMapSpec, DigraphSpec or OdeSpec
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    try:
        return SPEC_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise _schema_error(exc) from exc


def read_spec(path):
    """
    Load a spec file together with its source text and SHA-256 digest.

    Returns:
        tuple: (spec, text, hex digest)
    """
    if not os.path.isfile(path):
        raise InputError(f"spec file not found: {path}")
    with open(path, 'rb') as f:
        raw = f.read()
    try:
        text = raw.decode('utf-8')
    except UnicodeDecodeError as exc:
        raise ParseError(f"spec file is not UTF-8: {exc.reason}") from exc
    spec = parse_spec(text)
    logger.info("loaded %s spec from %s", spec.kind, path)
    return spec, text, hashlib.sha256(raw).hexdigest()


def load_spec(path):
    """
    Load and validate a system spec file.

    Args:
        path (str): Path to a UTF-8 JSON file

    Returns:
        FiniteMapSpec, DigraphSpec or OdeSpec
    """
    return read_spec(path)[0]


def load_chain(path, ts):
    """
    Load an attractor chain: a JSON list of cell lists.

    Cells are given by label (finite systems) or by integer index.

    Returns:
        list: One frozenset of cell indices per chain entry
    """
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, list) or not all(isinstance(entry, list) for entry in data):
        raise SchemaError('chain must be a list of cell lists', 'chain')
    chain = []
    for entry in data:
        cells = set()
        for item in entry:
            cells.add(resolve_cell(ts, item))
        chain.append(frozenset(cells))
    return chain


def resolve_cell(ts, item):
    """Cell index of a label or an index."""
    label = str(item)
    if label in ts.labels:
        return ts.labels.index(label)
    if isinstance(item, int) and not isinstance(item, bool) and 0 <= item < ts.n_cells:
        return item
    raise UnknownState(label)
