"""
CLI Output
Schema-checked, byte-stable JSON on stdout or a file
"""

from pathlib import Path
from typing import Any, Dict, Optional, Type, Union

from pydantic import BaseModel

from primesums.core.config import settings
from primesums.utils.helpers import dump_json, to_plain, write_text


def render(payload: Dict[str, Any], schema: Optional[Type[BaseModel]] = None) -> Dict[str, Any]:
    """Plain JSON-ready dict, validated against a schema when one is given"""
    body = to_plain(payload)
    if schema is not None:
        body = schema(**body).model_dump()
    body.setdefault("schema_version", settings.SCHEMA_VERSION)
    return body


def emit(payload: Dict[str, Any], out: Optional[Union[str, Path]] = None,
         schema: Optional[Type[BaseModel]] = None) -> Dict[str, Any]:
    body = render(payload, schema)
    write_text(dump_json(body), out)
    return body
