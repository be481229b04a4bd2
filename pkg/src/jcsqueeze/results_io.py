"""CSV / JSON serialization with bit-stable float formatting."""
from __future__ import annotations

import contextlib
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, fields

import numpy as np

from .entanglement import DemResult
from .sweep import SweepResult, SweepRow


def fmt(x) -> str:
    """17 significant digits; integers and strings pass through."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


class _FloatEncoder(json.JSONEncoder):
    # json's float repr is already round-trip exact; this only normalizes numpy types.
    def default(self, o):
        if isinstance(o, np.generic):
            return o.item()
        return super().default(o)


@contextlib.contextmanager
def atomic_output(path):
    """Yield a text stream; files appear only if the block completes."""
    if path in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_table(stream, header, columns):
    """Write equal-length columns as CSV."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for values in zip(*columns):
        writer.writerow([fmt(v) for v in values])


def read_table(stream) -> dict:
    reader = csv.reader(stream)
    header = next(reader)
    cols = {h: [] for h in header}
    for row in reader:
        for h, v in zip(header, row):
            cols[h].append(float(v))
    return {h: np.array(v) for h, v in cols.items()}


_ROW_TYPES = {f.name: f.type for f in fields(SweepRow)}


def _parse_row(record: dict) -> SweepRow:
    kw = {}
    for name, kind in _ROW_TYPES.items():
        v = record.get(name)
        if kind == "str":
            kw[name] = "" if v is None else str(v)
        elif kind == "int":
            kw[name] = int(v)
        else:
            kw[name] = math.nan if v in (None, "") else float(v)
    return SweepRow(**kw)


def write_sweep_csv(stream, result: SweepResult):
    writer = csv.writer(stream, lineterminator="\n")
    cols = SweepRow.columns()
    writer.writerow(cols)
    for row in result.rows:
        writer.writerow([fmt(getattr(row, c)) for c in cols])


def read_sweep_csv(stream) -> list:
    return [_parse_row(rec) for rec in csv.DictReader(stream)]


def write_sweep_json(stream, result: SweepResult):
    doc = {
        "provenance": _json_value(result.provenance),
        "rows": [_json_value(asdict(row)) for row in result.rows],
    }
    json.dump(doc, stream, cls=_FloatEncoder, indent=1)
    stream.write("\n")


def read_sweep_json(stream) -> SweepResult:
    doc = json.load(stream)
    return SweepResult([_parse_row(rec) for rec in doc["rows"]], doc["provenance"])


def write_surface_matrix(stream, result: SweepResult, mode: str | None = None, t_index: int = 0):
    """Gnuplot ``nonuniform matrix``: first row holds lambda1, first column holds r."""
    lam = result.provenance["lambda1_grid"]
    rs = result.provenance["r_grid"]
    z = result.values(mode)[:, :, t_index]
    stream.write(" ".join([fmt(len(lam))] + [fmt(float(v)) for v in lam]) + "\n")
    for j, r in enumerate(rs):
        stream.write(" ".join([fmt(float(r))] + [fmt(float(z[i, j])) for i in range(len(lam))]) + "\n")


def dem_result_to_dict(res: DemResult) -> dict:
    return _json_value(asdict(res))


def dem_result_from_dict(d: dict) -> DemResult:
    kw = {}
    for f in fields(DemResult):
        v = d.get(f.name)
        if f.type == "str":
            kw[f.name] = v
        else:
            kw[f.name] = math.nan if v is None else float(v)
    return DemResult(**kw)


def dumps_json(doc) -> str:
    buf = io.StringIO()
    json.dump(_json_value(doc), buf, cls=_FloatEncoder, indent=1)
    return buf.getvalue() + "\n"
