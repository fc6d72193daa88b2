"""File formats: complex JSON, barcode and growth CSVs, polylines, reports.

Readers raise ``InputError`` carrying the file, line and field of the
first problem found. Writers produce byte-stable output: fixed column
order, ``repr`` floats, sorted JSON keys and a trailing newline.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from .growth import GrowthSeries
from .novikov import NovikovComplex, NovikovGenerator, UnpinnedBarcode
from .persistence import Bar, Barcode, ComplexError, FilteredComplexF2, Generator

INF = math.inf


class InputError(ValueError):
    def __init__(self, source: str, message: str, *, line: int | None = None, field: str | None = None):
        self.source, self.line, self.field = source, line, field
        where = source
        if line is not None:
            where += f":{line}"
        if field is not None:
            where += f" [{field}]"
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# scalars


def fmt_float(x: float) -> str:
    x = float(x)
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _parse_float(text: str, source: str, line: int, field: str, *, allow_inf: bool = False) -> float:
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity"):
        if allow_inf:
            return INF
        raise InputError(source, "infinite value not allowed here", line=line, field=field)
    try:
        v = float(t)
    except ValueError:
        raise InputError(source, f"not a number: {text!r}", line=line, field=field) from None
    if not math.isfinite(v):
        raise InputError(source, f"not a finite number: {text!r}", line=line, field=field)
    return v


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else fmt_float(v)
    return obj


def dumps_json(obj: Any) -> str:
    """Deterministic JSON; non-finite floats become the strings "inf"/"nan"."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def atomic_write(path: str | os.PathLike, data: str | bytes) -> None:
    """Write through a temporary sibling and rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    raw = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(raw)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(src: str | os.PathLike | Mapping) -> tuple[dict, str]:
    if isinstance(src, Mapping):
        return dict(src), "<dict>"
    name = str(src)
    try:
        text = Path(src).read_text()
    except OSError as e:
        raise InputError(name, f"cannot read: {e.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(name, f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(data, dict):
        raise InputError(name, "top level must be an object")
    return data, name


def _read_csv(src: str | os.PathLike, header: tuple[str, ...], optional: tuple[str, ...] = ()) -> tuple[str, list[tuple[int, dict]]]:
    name = str(src)
    try:
        text = Path(src).read_text()
    except OSError as e:
        raise InputError(name, f"cannot read: {e.strerror}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        cols = [c.strip() for c in next(reader)]
    except StopIteration:
        raise InputError(name, "empty file", line=1) from None
    missing = [h for h in header if h not in cols]
    if missing:
        raise InputError(name, f"header must contain {','.join(header)}; missing {','.join(missing)}", line=1)
    extra = [c for c in cols if c not in header + optional]
    if extra:
        raise InputError(name, f"unexpected column {extra[0]!r}", line=1)
    rows = []
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(cols):
            raise InputError(name, f"expected {len(cols)} fields, got {len(row)}", line=line)
        rows.append((line, dict(zip(cols, row))))
    return name, rows


# ---------------------------------------------------------------------------
# complexes


def complex_from_json(src: str | os.PathLike | Mapping) -> FilteredComplexF2 | NovikovComplex:
    """Read {coefficients, generators: [{id, action, degree?}], boundary: [{from, to, exponents?}]}."""
    data, name = _load_json(src)
    coeff = data.get("coefficients", "F2")
    if coeff not in ("F2", "Novikov-F2"):
        raise InputError(name, f"unsupported coefficients {coeff!r}", field="coefficients")
    gens_raw = data.get("generators")
    if not isinstance(gens_raw, list):
        raise InputError(name, "missing generators list", field="generators")
    gens = []
    for k, g in enumerate(gens_raw):
        fld = f"generators[{k}]"
        if not isinstance(g, Mapping) or "id" not in g or "action" not in g:
            raise InputError(name, "each generator needs id and action", field=fld)
        gid = g["id"]
        if not isinstance(gid, (str, int)) or isinstance(gid, bool):
            raise InputError(name, "id must be a string or integer", field=f"{fld}.id")
        a = g["action"]
        if isinstance(a, bool) or not isinstance(a, (int, float)) or not math.isfinite(a):
            raise InputError(name, "action must be a finite number", field=f"{fld}.action")
        deg = g.get("degree")
        if deg is not None and (isinstance(deg, bool) or not isinstance(deg, int)):
            raise InputError(name, "degree must be an integer", field=f"{fld}.degree")
        gens.append((gid, float(a), deg))
    bd_raw = data.get("boundary", [])
    if not isinstance(bd_raw, list):
        raise InputError(name, "boundary must be a list", field="boundary")
    entries = []
    for k, e in enumerate(bd_raw):
        fld = f"boundary[{k}]"
        if not isinstance(e, Mapping) or "from" not in e or "to" not in e:
            raise InputError(name, "each boundary entry needs from and to", field=fld)
        exps = e.get("exponents")
        if coeff == "Novikov-F2":
            if not isinstance(exps, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in exps):
                raise InputError(name, "Novikov entries need a numeric exponents list", field=f"{fld}.exponents")
        elif exps is not None:
            raise InputError(name, "exponents only allowed with Novikov-F2 coefficients", field=f"{fld}.exponents")
        entries.append((e["from"], e["to"], exps))
    try:
        if coeff == "F2":
            bd: dict = {}
            for i, j, _ in entries:
                bd.setdefault(i, []).append(j)
            return FilteredComplexF2([Generator(i, a, d) for i, a, d in gens], bd)
        diff: dict = {}
        for i, j, exps in entries:
            diff.setdefault((i, j), []).extend(float(x) for x in exps)
        return NovikovComplex([NovikovGenerator(i, a) for i, a, _ in gens], diff)
    except ComplexError as e:
        raise InputError(name, str(e)) from None


def complex_to_json(c: FilteredComplexF2 | NovikovComplex) -> dict:
    if isinstance(c, NovikovComplex):
        gens = [{"id": g.id, "action": g.action} for g in c.generators]
        bd = [{"from": i, "to": j, "exponents": list(lam.terms)} for (i, j), lam in sorted(c.differential.items(), key=lambda kv: (c.index[kv[0][0]], c.index[kv[0][1]]))]
        return {"coefficients": "Novikov-F2", "generators": gens, "boundary": bd}
    gens = []
    for g in c.generators:
        d = {"id": g.id, "action": g.action}
        if g.degree is not None:
            d["degree"] = g.degree
        gens.append(d)
    bd = [{"from": g.id, "to": f} for g in c.generators for f in sorted(c.boundary.get(g.id, ()), key=c.index.get)]
    return {"coefficients": "F2", "generators": gens, "boundary": bd}


# ---------------------------------------------------------------------------
# barcodes


def barcode_csv(b: Barcode) -> str:
    out = ["start,end,multiplicity"]
    for bar in b.bars:
        out.append(f"{fmt_float(bar.start)},{fmt_float(bar.end)},{bar.multiplicity}")
    return "\n".join(out) + "\n"


def barcode_json(b: Barcode) -> dict:
    bars = []
    for bar in b.bars:
        d = {"start": bar.start, "end": bar.end, "multiplicity": bar.multiplicity}
        if bar.degree is not None:
            d["degree"] = bar.degree
        bars.append(d)
    return {"bars": bars}


def read_barcode_csv(src: str | os.PathLike) -> Barcode:
    name, rows = _read_csv(src, ("start", "end", "multiplicity"), ("degree",))
    bars = []
    for line, r in rows:
        s = _parse_float(r["start"], name, line, "start")
        e = _parse_float(r["end"], name, line, "end", allow_inf=True)
        try:
            m = int(r["multiplicity"])
        except ValueError:
            raise InputError(name, f"multiplicity must be an integer, got {r['multiplicity']!r}", line=line, field="multiplicity") from None
        deg = None
        if r.get("degree", "").strip():
            try:
                deg = int(r["degree"])
            except ValueError:
                raise InputError(name, "degree must be an integer", line=line, field="degree") from None
        try:
            bars.append(Bar(s, e, m, deg))
        except ValueError as err:
            raise InputError(name, str(err), line=line) from None
    return Barcode(bars)


def unpinned_csv(b: UnpinnedBarcode) -> str:
    return "length\n" + "".join(f"{fmt_float(x)}\n" for x in b.lengths)


def read_unpinned_csv(src: str | os.PathLike) -> UnpinnedBarcode:
    name, rows = _read_csv(src, ("length",))
    vals = []
    for line, r in rows:
        v = _parse_float(r["length"], name, line, "length", allow_inf=True)
        if v <= 0:
            raise InputError(name, "bar length must be positive", line=line, field="length")
        vals.append(v)
    return UnpinnedBarcode(vals)


def read_barcode_dir(path: str | os.PathLike) -> tuple[list[float], list]:
    """Barcode CSVs named by their index (``12.csv`` or ``12.5.csv``), sorted by index.

    Files with a ``length`` header load as unpinned barcodes.
    """
    path = Path(path)
    if not path.is_dir():
        raise InputError(str(path), "not a directory")
    items = []
    for f in path.glob("*.csv"):
        try:
            idx = float(f.stem)
        except ValueError:
            raise InputError(str(f), "file name must be the numeric index") from None
        first = f.read_text().split("\n", 1)[0].strip()
        items.append((idx, read_unpinned_csv(f) if first == "length" else read_barcode_csv(f)))
    if not items:
        raise InputError(str(path), "no barcode CSVs found")
    items.sort(key=lambda t: t[0])
    return [i for i, _ in items], [b for _, b in items]


# ---------------------------------------------------------------------------
# growth series and polylines


def growth_csv(series: GrowthSeries, key: str = "index") -> str:
    """Series as CSV; dynamics writes ``k,count``, everything else ``index,count``."""
    return f"{key},count\n" + "".join(f"{fmt_float(i)},{fmt_float(c)}\n" for i, c in zip(series.index, series.counts))


def read_growth_csv(src: str | os.PathLike) -> GrowthSeries:
    # dynamics writes k,count; accept both headers
    name = str(src)
    try:
        head = Path(src).read_text().split("\n", 1)[0]
    except OSError as e:
        raise InputError(name, f"cannot read: {e.strerror}") from None
    key = "k" if [c.strip() for c in head.split(",")][:1] == ["k"] else "index"
    name, rows = _read_csv(src, (key, "count"))
    idx = [_parse_float(r[key], name, line, key) for line, r in rows]
    cnt = [_parse_float(r["count"], name, line, "count") for line, r in rows]
    try:
        return GrowthSeries(idx, cnt)
    except ValueError as e:
        raise InputError(name, str(e)) from None


def polyline_csv(pts: np.ndarray, cols: tuple[str, str] = ("x", "y")) -> str:
    pts = np.asarray(pts, dtype=float)
    return f"{cols[0]},{cols[1]}\n" + "".join(f"{fmt_float(a)},{fmt_float(b)}\n" for a, b in pts)


def read_polyline_csv(src: str | os.PathLike) -> np.ndarray:
    """Polyline with header x,y or theta,p."""
    name = str(src)
    try:
        head = Path(src).read_text().split("\n", 1)[0]
    except OSError as e:
        raise InputError(name, f"cannot read: {e.strerror}") from None
    cols = ("theta", "p") if head.strip().startswith("theta") else ("x", "y")
    name, rows = _read_csv(src, cols)
    pts = [[_parse_float(r[c], name, line, c) for c in cols] for line, r in rows]
    if len(pts) < 2:
        raise InputError(name, "polyline needs at least 2 points")
    return np.array(pts)


def spec_from_json(src: str | os.PathLike | Mapping, kinds: Iterable[str] | None = None) -> dict:
    data, name = _load_json(src)
    if "kind" not in data and kinds is not None:
        raise InputError(name, "missing kind", field="kind")
    if kinds is not None and data["kind"] not in kinds:
        raise InputError(name, f"unknown kind {data['kind']!r}; expected one of {', '.join(sorted(kinds))}", field="kind")
    return data
