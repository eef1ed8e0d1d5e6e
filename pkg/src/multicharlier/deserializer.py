"""
Load a JSON table written by serializer.table_to_json back into a CharlierTable.

Only the symbolic coefficients are read; "display" is ignored. Every
problem with the document is a ConfigError naming the offending entry.
"""

import json

from charlier import CharlierParams, CharlierTable
from errors import ConfigError, ParameterError
from polycore import MultiIndex, UniPoly, iter_indices, parse_rational
from serializer import TABLE_FORMAT


def _params_from(data: dict) -> CharlierParams:
    try:
        r = int(data["r"])
        sigma = tuple(parse_rational(str(s)) for s in data["sigma"])
        return CharlierParams(r, sigma)
    except (KeyError, TypeError, ValueError) as e:
        # ParameterError is a ValueError too
        raise ConfigError(f"Invalid params block: {e}") from e


def table_from_dict(data: dict) -> CharlierTable:
    if not isinstance(data, dict):
        raise ConfigError("Table document must be a JSON object")
    if data.get("format") != TABLE_FORMAT:
        raise ConfigError(f"Unsupported table format: {data.get('format')!r}")
    params = _params_from(data.get("params") or {})
    try:
        max_total = int(data["max_total_degree"])
        raw_entries = list(data["entries"])
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Missing table header field: {e}") from e

    entries = {}
    for position, item in enumerate(raw_entries):
        try:
            n = MultiIndex(item["index"])
            poly = UniPoly(tuple(parse_rational(str(c)) for c in item["coeffs"]))
        except (KeyError, TypeError, ValueError) as e:
            # ParameterError and ConfigError are ValueErrors too
            raise ConfigError(f"Malformed entry #{position}: {e}") from e
        if len(n) != params.r:
            raise ConfigError(f"Entry #{position} index {list(n)} does not have {params.r} components")
        if n.total > max_total:
            raise ConfigError(f"Entry #{position} index {list(n)} exceeds max_total_degree {max_total}")
        if n in entries:
            raise ConfigError(f"Duplicate entry for index {list(n)}")
        entries[n] = poly
    for n in iter_indices(params.r, max_total):
        if n not in entries:
            raise ConfigError(f"Missing entry for index {list(n)}")
    return CharlierTable(params, max_total, entries)


def table_from_json(text: str) -> CharlierTable:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Table is not valid JSON: {e}") from e
    return table_from_dict(data)
