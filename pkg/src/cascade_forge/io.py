"""CSV and JSON emission for census tables, branch polylines and cascades.

Floats are written with ``repr`` so that a file read back reproduces the
exact binary values, and JSON is dumped with sorted keys; identical inputs
give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .horseshoe import CensusRow
from .symbolic import ShiftCensus

__all__ = [
    "SHIFT_CENSUS_COLUMNS",
    "HORSESHOE_CENSUS_COLUMNS",
    "BRANCH_COLUMNS",
    "SUMMARY_COLUMNS",
    "dumps_json",
    "shift_census_csv",
    "read_shift_census_csv",
    "horseshoe_census_csv",
    "read_horseshoe_census_csv",
    "branch_rows",
    "branch_csv",
    "read_branch_csv",
    "summary_csv",
    "read_summary_csv",
    "file_stem",
]

SHIFT_CENSUS_COLUMNS = ("k", "points", "orbits", "even_orbits", "L")
HORSESHOE_CENSUS_COLUMNS = ("k", "expected_orbits", "expected_even", "found", "nonflip", "roundtrip_ok", "parity_ok")
BRANCH_COLUMNS = ("arclength", "A", "k", "x0", "y0", "sigma1_re", "sigma1_im", "sigma2_re", "sigma2_im", "index")
SUMMARY_COLUMNS = ("k", "expected", "built", "verified_unique")


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _to_csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _from_csv(text, columns):
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != tuple(columns):
        raise ValueError(f"unexpected columns {header}")
    return [dict(zip(header, row)) for row in reader if row]


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def dumps_json(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def file_stem(cycle):
    """Filesystem-safe name for a symbol cycle: ``k03_mmp`` for (-1,-1,+1)."""
    return f"k{cycle.k:02d}_" + "".join("p" if a == 1 else "m" for a in cycle.word)


def shift_census_csv(censuses):
    return _to_csv(SHIFT_CENSUS_COLUMNS, (c.as_row() for c in censuses))


def read_shift_census_csv(text):
    return [ShiftCensus(*(int(r[c]) for c in SHIFT_CENSUS_COLUMNS)) for r in _from_csv(text, SHIFT_CENSUS_COLUMNS)]


def horseshoe_census_csv(rows):
    return _to_csv(HORSESHOE_CENSUS_COLUMNS, ((getattr(r, c) for c in HORSESHOE_CENSUS_COLUMNS) for r in rows))


def read_horseshoe_census_csv(text):
    return [CensusRow(*(int(r[c]) for c in HORSESHOE_CENSUS_COLUMNS)) for r in _from_csv(text, HORSESHOE_CENSUS_COLUMNS)]


def branch_rows(segments):
    """Polyline rows for consecutive branch segments, arclength accumulated across them."""
    offset = 0.0
    for seg in segments:
        last = 0.0
        for bp in seg.points:
            o = bp.orbit
            s1, s2 = o.multipliers
            last = bp.arclength
            yield (
                offset + float(bp.arclength),
                float(o.A),
                o.k,
                float(o.points[0, 0]),
                float(o.points[0, 1]),
                float(s1.real),
                float(s1.imag),
                float(s2.real),
                float(s2.imag),
                o.index,
            )
        offset += float(last)


def branch_csv(segments):
    return _to_csv(BRANCH_COLUMNS, branch_rows(segments))


def read_branch_csv(text):
    out = []
    for r in _from_csv(text, BRANCH_COLUMNS):
        out.append(
            (
                float(r["arclength"]),
                float(r["A"]),
                int(r["k"]),
                float(r["x0"]),
                float(r["y0"]),
                float(r["sigma1_re"]),
                float(r["sigma1_im"]),
                float(r["sigma2_re"]),
                float(r["sigma2_im"]),
                int(r["index"]) if r["index"] else None,
            )
        )
    return out


def summary_csv(rows):
    return _to_csv(SUMMARY_COLUMNS, rows)


def read_summary_csv(text):
    return [
        (int(r["k"]), int(r["expected"]), int(r["built"]), r["verified_unique"] == "true")
        for r in _from_csv(text, SUMMARY_COLUMNS)
    ]
