"""Sequence-set files: a versioned text format and a JSON equivalent.

Text layout::

    # seqforge sequence set
    version=1
    L=4
    N=2
    N_C=1024
    N_S=1024
    c=1,2,3,4
    <N lines of 2L comma-separated floats: re0,im0,re1,im1,...>

Floats are written with 17 significant digits, so export then import is
bit-exact. Files ending in ``.json`` use the JSON layout instead, whose
``sequences`` field holds the same interleaved rows.
"""

import json
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError
from .model import SequenceSet, SubcarrierAssignment

FORMAT_VERSION = 1
HEADER_KEYS = ("version", "L", "N", "N_C", "N_S", "c")


def _interleave(row):
    out = np.empty(2 * row.size)
    out[0::2] = row.real
    out[1::2] = row.imag
    return out


def _deinterleave(values):
    v = np.asarray(values, dtype=np.float64)
    # assign parts separately: re + 1j*im does not preserve signed zeros
    out = np.empty(v.size // 2, dtype=np.complex128)
    out.real = v[0::2]
    out.imag = v[1::2]
    return out


def dumps_text(seqset):
    a = seqset.assignment
    lines = [
        "# seqforge sequence set",
        f"version={FORMAT_VERSION}",
        f"L={seqset.length}",
        f"N={seqset.n_sequences}",
        f"N_C={a.n_subcarriers}",
        f"N_S={a.n_samples}",
        "c=" + ",".join(str(int(x)) for x in a.indices),
    ]
    for row in seqset.sequences:
        lines.append(",".join(f"{x:.16e}" for x in _interleave(row)))
    return "\n".join(lines) + "\n"


def _int_field(header, key, line):
    try:
        return int(header[key])
    except ValueError:
        raise FormatError(f"{key} must be an integer, got {header[key]!r}", line) from None


def loads_text(text):
    header, header_lines, rows = {}, {}, []
    data_start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if data_start is None and "=" in line:
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in HEADER_KEYS:
                raise FormatError(f"unknown header field {key!r}", lineno)
            header[key] = value.strip()
            header_lines[key] = lineno
            continue
        if data_start is None:
            missing = [k for k in HEADER_KEYS if k not in header]
            if missing:
                raise FormatError(f"header is missing {', '.join(missing)}", lineno)
            data_start = lineno
        try:
            rows.append((lineno, [float(x) for x in line.split(",")]))
        except ValueError:
            raise FormatError("sequence row contains a non-numeric value", lineno) from None

    if data_start is None:
        missing = [k for k in HEADER_KEYS if k not in header]
        if missing:
            raise FormatError(f"header is missing {', '.join(missing)}")
    version = _int_field(header, "version", header_lines["version"])
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported version {version}", header_lines["version"])
    length = _int_field(header, "L", header_lines["L"])
    n = _int_field(header, "N", header_lines["N"])
    try:
        c = [int(x) for x in header["c"].split(",")]
    except ValueError:
        raise FormatError("c must be comma-separated integers", header_lines["c"]) from None
    if len(c) != length:
        raise FormatError(f"c has {len(c)} entries, expected L={length}", header_lines["c"])
    if len(rows) != n:
        where = rows[-1][0] if rows else None
        raise FormatError(f"expected N={n} sequence rows, found {len(rows)}", where)
    for lineno, vals in rows:
        if len(vals) != 2 * length:
            raise FormatError(f"row has {len(vals)} values, expected 2L={2 * length}", lineno)
    try:
        assign = SubcarrierAssignment(
            c,
            _int_field(header, "N_C", header_lines["N_C"]),
            _int_field(header, "N_S", header_lines["N_S"]),
        )
        p = np.array([_deinterleave(v) for _, v in rows])
        return SequenceSet(p, assign)
    except ValidationError as exc:
        raise FormatError(str(exc)) from exc


def dumps_json(seqset):
    a = seqset.assignment
    doc = {
        "version": FORMAT_VERSION,
        "L": seqset.length,
        "N": seqset.n_sequences,
        "N_C": a.n_subcarriers,
        "N_S": a.n_samples,
        "c": [int(x) for x in a.indices],
        "sequences": [_interleave(row).tolist() for row in seqset.sequences],
    }
    return json.dumps(doc) + "\n"


def loads_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno) from None
    missing = [k for k in HEADER_KEYS + ("sequences",) if k not in doc]
    if missing:
        raise FormatError(f"JSON document is missing {', '.join(missing)}")
    if doc["version"] != FORMAT_VERSION:
        raise FormatError(f"unsupported version {doc['version']}")
    length = int(doc["L"])
    rows = doc["sequences"]
    if len(rows) != int(doc["N"]):
        raise FormatError(f"expected N={doc['N']} sequences, found {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != 2 * length:
            raise FormatError(f"sequence {i} has {len(row)} values, expected {2 * length}")
    try:
        assign = SubcarrierAssignment(doc["c"], doc["N_C"], doc["N_S"])
        return SequenceSet(np.array([_deinterleave(r) for r in rows]), assign)
    except ValidationError as exc:
        raise FormatError(str(exc)) from exc


def _is_json(path):
    return Path(path).suffix.lower() == ".json"


def save(path, seqset):
    text = dumps_json(seqset) if _is_json(path) else dumps_text(seqset)
    Path(path).write_text(text)


def load(path):
    text = Path(path).read_text()
    return loads_json(text) if _is_json(path) else loads_text(text)
