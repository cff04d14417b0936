"""CSV / JSON artifact formats.

CSV files are UTF-8 with a header row, '.' decimal separator and
scientific notation at 17 significant digits, which round-trips float64
exactly.  Sequences dump as (n, re, im) and can be re-ingested as
array-backed sequences; profiles export one row per shift h.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ergolab.sequences import ArraySeq


def fmt(v: float) -> str:
    return f"{float(v):.16e}"


def write_sequence_csv(path, seq, start: int, count: int) -> None:
    vals = seq.values(start, count)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "re", "im"])
        for i in range(count):
            w.writerow([start + i, fmt(vals[i].real), fmt(vals[i].imag)])


def read_sequence_csv(path) -> ArraySeq:
    ns, vals = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if [c.strip() for c in header[:3]] != ["n", "re", "im"]:
            raise ValueError(f"{path}: expected header n,re,im")
        for row in r:
            if not row:
                continue
            ns.append(int(row[0]))
            vals.append(complex(float(row[1]), float(row[2])))
    if not ns:
        raise ValueError(f"{path}: empty sequence")
    if any(b != a + 1 for a, b in zip(ns, ns[1:])):
        raise ValueError(f"{path}: indices must be consecutive")
    return ArraySeq(data=np.asarray(vals, dtype=np.complex128), first=ns[0])


def write_profile_csv(path, prof) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["h", "re_ell", "im_ell", "abs_ell", "instability"])
        for h in range(prof.H + 1):
            e = prof.estimates[h]
            w.writerow(
                [h, fmt(e.real), fmt(e.imag), fmt(abs(e)), fmt(prof.instability[h])]
            )


def write_trace_csv(path, trace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n_or_N", "value"])
        for n, v in trace:
            w.writerow([int(n), fmt(v)])


def jsonify(obj):
    """JSON-encodable view of results (complex -> {re, im})."""
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.complexfloating,)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    return obj


def write_json(path, payload) -> None:
    Path(path).write_text(
        json.dumps(jsonify(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
