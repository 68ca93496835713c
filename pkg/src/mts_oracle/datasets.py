"""BrightKite and Citi Bike ingestion, and extraction of experiment instances.

The data files are not shipped; download them yourself:

* BrightKite check-ins (SNAP): ``loc-brightkite_totalCheckins.txt.gz`` from
  https://snap.stanford.edu/data/loc-brightkite.html
* Citi Bike 2017 trips: ``2017MM-citibike-tripdata.csv`` (or ``.csv.zip``)
  from https://s3.amazonaws.com/tripdata/index.html

``fetch_check`` looks for them under ``$MTS_ORACLE_DATA`` (default
``./data``), with Citi files either there or in a ``citi/`` subdirectory.
"""

from __future__ import annotations

import csv
import gzip
import io
import os
import statistics
import zipfile
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .caching.model import CachingInstance
from .caching.offline import belady_faults
from .errors import DegenerateGeo, InsufficientData, MalformedFile
from .icecream import C, V, IceCreamInstance

BK_FILENAME = "loc-brightkite_totalCheckins.txt.gz"
MALFORMED_LIMIT = 0.01


@dataclass(frozen=True)
class CheckinRecord:
    user: str
    timestamp: datetime
    latitude: float
    longitude: float
    location: str


@dataclass(frozen=True)
class TripRecord:
    start_time: datetime
    station: str

    @property
    def month(self) -> str:
        return f"{self.start_time.year:04d}-{self.start_time.month:02d}"


@dataclass
class CheckinTable:
    """Check-ins grouped per user, users in order of first appearance."""

    users: "OrderedDict[str, list]" = field(default_factory=OrderedDict)
    lines: int = 0
    skipped: int = 0

    def __len__(self):
        return len(self.users)

    def __getitem__(self, user):
        return self.users[user]

    def __iter__(self):
        return iter(self.users)

    def items(self):
        return self.users.items()


def _open_text(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8", newline="")
    return open(path, "r", encoding="utf-8", newline="")


def _parse_time(s: str) -> datetime:
    s = s.strip()
    if s.endswith("Z"):
        s = s[:-1]
    try:
        return datetime.fromisoformat(s)
    except ValueError:
        pass
    for fmt in ("%m/%d/%Y %H:%M:%S", "%m/%d/%Y %H:%M"):
        try:
            return datetime.strptime(s, fmt)
        except ValueError:
            continue
    raise ValueError(f"unparseable time {s!r}")


def parse_checkin_line(line: str) -> CheckinRecord:
    parts = line.rstrip("\r\n").split("\t")
    if len(parts) != 5 or not parts[0] or not parts[4]:
        raise ValueError("expected 5 non-empty tab-separated fields")
    return CheckinRecord(parts[0], _parse_time(parts[1]), float(parts[2]), float(parts[3]), parts[4])


def parse_brightkite(path) -> CheckinTable:
    """Stream a BrightKite TSV (plain or gzip); malformed lines are skipped and counted."""
    table = CheckinTable()
    with _open_text(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            table.lines += 1
            try:
                rec = parse_checkin_line(line)
            except ValueError:
                table.skipped += 1
                continue
            table.users.setdefault(rec.user, []).append(rec)
    if table.lines and table.skipped > MALFORMED_LIMIT * table.lines:
        raise MalformedFile(f"{path}: {table.skipped} of {table.lines} lines malformed")
    return table


def intern_ids(ids) -> list:
    """Map ids to dense integers in order of first appearance."""
    table: dict = {}
    return [table.setdefault(x, len(table)) for x in ids]


def optimal_evictions(instance: CachingInstance, count_compulsory: bool = False) -> int:
    """Evictions made by Belady; with ``count_compulsory`` all faults are counted."""
    faults = belady_faults(instance)
    if count_compulsory:
        return faults
    return faults - min(instance.k, len(set(instance.requests)))


def extract_bk_caching_instances(
    table,
    k: int = 10,
    length: int = 2100,
    min_evictions: int = 50,
    limit: int = 100,
    count_compulsory: bool = False,
    strict: bool = True,
) -> list:
    """Users with exactly ``length`` check-ins whose optimum evicts at least
    ``min_evictions`` pages, first ``limit`` in file order.

    Requests are location ids interned per user.  With ``strict`` fewer than
    ``limit`` qualifying users raise :class:`InsufficientData`.
    """
    chosen = select_bk_users(table, k, length, min_evictions, limit, count_compulsory, strict)
    return [inst for _, _, inst in chosen]


def select_bk_users(
    table,
    k: int = 10,
    length: int = 2100,
    min_evictions: int = 50,
    limit: int = 100,
    count_compulsory: bool = False,
    strict: bool = True,
) -> list:
    """The users behind :func:`extract_bk_caching_instances` as ``(user, records, instance)``."""
    users = table.items() if hasattr(table, "items") else table
    out = []
    for user, recs in users:
        if len(recs) != length:
            continue
        inst = CachingInstance(k, tuple(intern_ids(r.location for r in recs)))
        if optimal_evictions(inst, count_compulsory) >= min_evictions:
            out.append((user, recs, inst))
            if len(out) == limit:
                break
    if strict and len(out) < limit:
        raise InsufficientData(f"only {len(out)} of {limit} BrightKite users qualify")
    return out


# -- Citi Bike -------------------------------------------------------------------

_TIME_COLS = ("starttime", "start time")
_STATION_COLS = ("start station id",)


def _find_col(header, names, path):
    lowered = [h.strip().lower() for h in header]
    for name in names:
        if name in lowered:
            return lowered.index(name)
    raise MalformedFile(f"{path}: missing column {names[0]!r}")


def _citi_streams(path):
    path = Path(path)
    if path.suffix == ".zip":
        with zipfile.ZipFile(path) as zf:
            for name in sorted(zf.namelist()):
                if name.lower().endswith(".csv") and not name.startswith("__MACOSX"):
                    with zf.open(name) as raw:
                        yield io.TextIOWrapper(raw, encoding="utf-8", newline="")
    else:
        with _open_text(path) as fh:
            yield fh


def parse_citi(path):
    """Yield :class:`TripRecord` from a Citi CSV (plain, gzip or zip); bad rows are skipped.

    Raises :class:`MalformedFile` if more than 1% of rows fail to parse.
    """
    rows = skipped = 0
    for fh in _citi_streams(path):
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            continue
        ti = _find_col(header, _TIME_COLS, path)
        si = _find_col(header, _STATION_COLS, path)
        for row in reader:
            if not row:
                continue
            rows += 1
            try:
                station = row[si].strip()
                if not station or station.upper() == "NULL":
                    raise ValueError("empty station")
                rec = TripRecord(_parse_time(row[ti]), station)
            except (ValueError, IndexError):
                skipped += 1
                continue
            yield rec
    if rows and skipped > MALFORMED_LIMIT * rows:
        raise MalformedFile(f"{path}: {skipped} of {rows} rows malformed")


def extract_citi_instances(trips, k: int = 100, length: int = 25000, strict: bool = True) -> dict:
    """One instance per month: the first ``length`` trips' start stations.

    Returns ``{"YYYY-MM": CachingInstance}`` in month order.  Station ids are
    interned per month by first appearance.
    """
    by_month: dict = {}
    for trip in trips:
        seq = by_month.setdefault(trip.month, [])
        if len(seq) < length:
            seq.append(trip.station)
    out = {}
    for month in sorted(by_month):
        seq = by_month[month]
        if len(seq) < length:
            if strict:
                raise InsufficientData(f"month {month} has only {len(seq)} trips")
            continue
        out[month] = CachingInstance(k, tuple(intern_ids(seq)))
    return out


# -- ice cream from geography ----------------------------------------------------

SPLIT_RULES = ("midpoint", "median")


def geo_split_icecream(records, rule: str = "midpoint") -> IceCreamInstance:
    """``V`` for check-ins strictly north of the split latitude, else ``C``."""
    if rule not in SPLIT_RULES:
        raise ValueError(f"unknown split rule {rule!r}")
    lats = [r.latitude if hasattr(r, "latitude") else float(r) for r in records]
    if not lats or min(lats) == max(lats):
        raise DegenerateGeo("need at least two distinct latitudes")
    split = (min(lats) + max(lats)) / 2 if rule == "midpoint" else statistics.median(lats)
    return IceCreamInstance(tuple(V if lat > split else C for lat in lats))


def extract_bk_icecream_instances(table, min_length: int = 2, rule: str = "midpoint") -> list:
    """Ice-cream instances for every user with enough distinct latitudes."""
    out = []
    for _, recs in table.items():
        if len(recs) < min_length:
            continue
        try:
            out.append(geo_split_icecream(recs, rule))
        except DegenerateGeo:
            continue
    return out


# -- locating downloads ------------------------------------------------------------


def data_dir() -> Path:
    return Path(os.environ.get("MTS_ORACLE_DATA", "data"))


def find_brightkite(root=None):
    root = Path(root) if root is not None else data_dir()
    for name in (BK_FILENAME, BK_FILENAME[:-3]):
        p = root / name
        if p.exists():
            return p
    return None


def find_citi(root=None, year: int = 2017) -> list:
    root = Path(root) if root is not None else data_dir()
    found = []
    for d in (root, root / "citi"):
        if d.is_dir():
            found += [p for p in d.iterdir() if p.name.startswith(str(year)) and "citibike" in p.name.lower()]
    return sorted(set(found))


def fetch_check(root=None) -> dict:
    """Report which dataset files are present and whether their headers parse."""
    report = {"brightkite": None, "citi": []}
    bk = find_brightkite(root)
    if bk is not None:
        with _open_text(bk) as fh:
            first = next((ln for ln in fh if ln.strip()), "")
        parse_checkin_line(first)
        report["brightkite"] = str(bk)
    for p in find_citi(root):
        next(iter(parse_citi(p)), None)
        report["citi"].append(str(p))
    return report
