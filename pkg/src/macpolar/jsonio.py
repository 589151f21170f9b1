"""File formats: channel specs in JSON, code specs in JSON, results in CSV.

Two channel formats are accepted and distinguished by their keys:

explicit table            {"q": 2, "m": 2, "outputs": 4,
                           "rows": [[p, ...], ...]}
    rows are indexed by the input vector as a little-endian radix-q
    integer (user 1 least significant), one row per input, one column
    per output.

linear combination        {"q": 2, "m": 2,
                           "terms": [{"p": 0.2, "basis": [[1, 0]]}, ...]}
    each term carries a weight and a list of vectors spanning its
    subspace (an empty list is the zero subspace).

CSV files start with an optional "# generated:" timestamp line (suppressed
for byte-reproducible runs) followed by a "# config:" echo of the resolved
run configuration; floats are written with repr so files round-trip.
"""

from __future__ import annotations

import datetime
import json

from .errors import ParseError
from .linear_mac import LinearComboMac
from .mac import DiscreteMac
from .polarize import CodeSpec
from .subspace import Subspace


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: "
                         f"{exc.msg}") from exc


def channel_from_dict(data: dict, where: str = "<channel>"):
    """Build a DiscreteMac or LinearComboMac from parsed JSON."""
    if not isinstance(data, dict):
        raise ParseError(f"{where}: top level must be an object")
    for key in ("q", "m"):
        if key not in data:
            raise ParseError(f"{where}: missing field {key!r}")
    try:
        q, m = int(data["q"]), int(data["m"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: q and m must be integers") from exc
    if "rows" in data:
        rows = data["rows"]
        if not isinstance(rows, list) or len(rows) != q ** m:
            raise ParseError(f"{where}: 'rows' must list q^m = {q ** m} rows")
        n_out = data.get("outputs", len(rows[0]))
        if any(not isinstance(r, list) or len(r) != n_out for r in rows):
            raise ParseError(f"{where}: all rows must have {n_out} entries")
        try:
            mac = DiscreteMac(q, m, rows)
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from exc
        mac.validate()
        return mac
    if "terms" in data:
        terms = []
        for i, term in enumerate(data["terms"]):
            if "p" not in term or "basis" not in term:
                raise ParseError(f"{where}: term {i} needs 'p' and 'basis'")
            try:
                sub = Subspace.from_vectors(term["basis"], m, q)
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{where}: term {i}: {exc}") from exc
            terms.append((float(term["p"]), sub))
        try:
            return LinearComboMac(q, m, terms)
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from exc
    raise ParseError(f"{where}: need either 'rows' or 'terms'")


def load_channel(path: str):
    return channel_from_dict(_load_json(path), where=path)


def channel_to_dict(channel) -> dict:
    if isinstance(channel, DiscreteMac):
        return {"q": channel.q, "m": channel.m,
                "outputs": channel.output_size,
                "rows": channel.table.tolist()}
    if isinstance(channel, LinearComboMac):
        return {"q": channel.q, "m": channel.m,
                "terms": [{"p": w, "basis": s.basis.data.tolist()}
                          for w, s in channel.terms]}
    raise TypeError(f"not a channel: {type(channel)!r}")


def load_codespec(path: str) -> CodeSpec:
    data = _load_json(path)
    try:
        return CodeSpec.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad code spec: {exc}") from exc


def save_codespec(path: str, spec: CodeSpec) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(spec.to_json())
        fh.write("\n")


def fmt(value) -> str:
    """Deterministic cell formatting; repr for floats round-trips exactly."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, columns, rows, config: dict,
              timestamp: bool = True) -> None:
    lines = []
    if timestamp:
        lines.append(f"# generated: {datetime.datetime.now().isoformat()}")
    lines.append("# config: " + json.dumps(config, sort_keys=True))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
