import gzip
import zipfile
from datetime import datetime, timedelta
from pathlib import Path

import pytest

from mts_oracle import datasets
from mts_oracle.caching import CachingInstance, belady_faults
from mts_oracle.datasets import (
    TripRecord,
    extract_bk_caching_instances,
    extract_bk_icecream_instances,
    extract_citi_instances,
    geo_split_icecream,
    intern_ids,
    optimal_evictions,
    parse_brightkite,
    parse_citi,
)
from mts_oracle.errors import DegenerateGeo, InsufficientData, MalformedFile
from mts_oracle.icecream import C, V

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def bk_line(user, loc, lat=1.0, day=1):
    return f"{user}\t2010-01-{day:02d}T12:00:00Z\t{lat}\t2.0\t{loc}\n"


def write(path, text):
    path.write_text(text)
    return path


def user_with_evictions(user, evictions, length, k=10):
    """k+evictions distinct locations once each, then the last one repeated."""
    distinct = min(k + evictions, length)
    locs = [f"L{i}" for i in range(distinct)] + [f"L{distinct - 1}"] * (length - distinct)
    return "".join(bk_line(user, loc) for loc in locs)


class TestParseBrightkite:
    def test_empty(self, tmp_path):
        t = parse_brightkite(write(tmp_path / "e.tsv", ""))
        assert len(t) == 0 and t.skipped == 0

    def test_two_users_in_order(self, tmp_path):
        t = parse_brightkite(write(tmp_path / "a.tsv", bk_line("u1", "a") + bk_line("u2", "b") + bk_line("u1", "c", day=2)))
        assert list(t) == ["u1", "u2"]
        assert [r.location for r in t["u1"]] == ["a", "c"]
        rec = t["u1"][0]
        assert rec.timestamp == datetime(2010, 1, 1, 12) and rec.latitude == 1.0 and rec.longitude == 2.0

    def test_missing_column_counted(self, tmp_path):
        good = "".join(bk_line("u", f"l{i}") for i in range(200))
        t = parse_brightkite(write(tmp_path / "m.tsv", good + "u\t2010-01-01T00:00:00Z\t1.0\t2.0\n"))
        assert t.skipped == 1 and len(t["u"]) == 200

    def test_too_many_malformed(self, tmp_path):
        with pytest.raises(MalformedFile):
            parse_brightkite(write(tmp_path / "bad.tsv", bk_line("u", "a") + "garbage\n"))

    def test_gzip(self, tmp_path):
        p = tmp_path / "x.txt.gz"
        with gzip.open(p, "wt") as fh:
            fh.write(bk_line("u", "a") + bk_line("v", "b"))
        assert list(parse_brightkite(p)) == ["u", "v"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            parse_brightkite(tmp_path / "nope.tsv")

    def test_fixture(self):
        t = parse_brightkite(FIXTURES / "brightkite_sample.tsv")
        assert [len(t[u]) for u in t] == [40, 30, 12] and t.skipped == 0


class TestBkExtraction:
    def test_filter_semantics(self, tmp_path):
        text = user_with_evictions("a", 60, 2100) + user_with_evictions("b", 10, 2100) + user_with_evictions("c", 99, 50)
        table = parse_brightkite(write(tmp_path / "bk.tsv", text))
        assert [optimal_evictions(CachingInstance(10, tuple(intern_ids(r.location for r in table[u])))) for u in "ab"] == [60, 10]
        insts = extract_bk_caching_instances(table, strict=False)
        assert len(insts) == 1 and len(insts[0].requests) == 2100 and insts[0].k == 10
        with pytest.raises(InsufficientData):
            extract_bk_caching_instances(table)

    def test_single_page_user_excluded(self, tmp_path):
        table = parse_brightkite(write(tmp_path / "one.tsv", "".join(bk_line("u", "same") for _ in range(2100))))
        assert belady_faults(CachingInstance(10, (0,) * 2100)) == 1
        assert extract_bk_caching_instances(table, strict=False) == []

    def test_compulsory_flag(self, tmp_path):
        table = parse_brightkite(write(tmp_path / "bk.tsv", user_with_evictions("a", 45, 2100)))
        assert extract_bk_caching_instances(table, strict=False) == []
        assert len(extract_bk_caching_instances(table, strict=False, count_compulsory=True)) == 1

    def test_limit_and_order(self, tmp_path):
        text = "".join(user_with_evictions(u, 50, 100) for u in "zyx")
        table = parse_brightkite(write(tmp_path / "bk.tsv", text))
        chosen = datasets.select_bk_users(table, length=100, limit=2)
        assert [u for u, _, _ in chosen] == ["z", "y"]

    def test_deterministic(self, tmp_path):
        p = write(tmp_path / "bk.tsv", user_with_evictions("a", 60, 2100))
        assert extract_bk_caching_instances(parse_brightkite(p), strict=False) == extract_bk_caching_instances(
            parse_brightkite(p), strict=False
        )


def citi_csv(path, trips, header=("tripduration", "starttime", "stoptime", "start station id", "end station id")):
    lines = [",".join(f'"{h}"' for h in header)]
    for t, s in trips:
        lines.append(f'"300","{t}","{t}","{s}","1"')
    path.write_text("\n".join(lines) + "\n")
    return path


class TestCiti:
    def test_truncation(self, tmp_path):
        start = datetime(2017, 3, 1)
        trips = [TripRecord(start + timedelta(seconds=i), str(i % 700)) for i in range(30000)]
        out = extract_citi_instances(trips)
        assert list(out) == ["2017-03"]
        inst = out["2017-03"]
        assert len(inst.requests) == 25000 and inst.k == 100

    def test_short_month(self):
        trips = [TripRecord(datetime(2017, 1, 1, 0, i), "5") for i in range(10)]
        with pytest.raises(InsufficientData):
            extract_citi_instances(trips)
        assert extract_citi_instances(trips, strict=False) == {}

    def test_interning(self):
        trips = [TripRecord(datetime(2017, 1, 1), s) for s in ["72", "3", "72", "9", "3"]]
        inst = extract_citi_instances(trips, length=5)["2017-01"]
        assert inst.requests == (0, 1, 0, 2, 1)
        assert intern_ids("baab") == [0, 1, 1, 0]

    def test_parse_and_columns(self, tmp_path):
        p = citi_csv(tmp_path / "a.csv", [("2017-06-01 00:00:01", "72"), ("2017-06-01 00:00:02", "79")])
        assert [(t.month, t.station) for t in parse_citi(p)] == [("2017-06", "72"), ("2017-06", "79")]
        q = citi_csv(
            tmp_path / "b.csv",
            [("2017-01-01 00:00:21", "3036")],
            header=("Trip Duration", "Start Time", "Stop Time", "Start Station ID", "End Station ID"),
        )
        assert [t.station for t in parse_citi(q)] == ["3036"]

    def test_missing_column(self, tmp_path):
        p = citi_csv(tmp_path / "c.csv", [("2017-06-01 00:00:01", "72")], header=("a", "starttime", "c", "d", "e"))
        with pytest.raises(MalformedFile):
            list(parse_citi(p))

    def test_zip(self, tmp_path):
        p = citi_csv(tmp_path / "201707-citibike-tripdata.csv", [("2017-07-01 00:00:01", "72")])
        z = tmp_path / "201707-citibike-tripdata.csv.zip"
        with zipfile.ZipFile(z, "w") as zf:
            zf.write(p, p.name)
        assert [t.station for t in parse_citi(z)] == ["72"]

    def test_fixture(self):
        out = extract_citi_instances(parse_citi(FIXTURES / "citi_sample.csv"), k=3, length=15)
        assert list(out) == ["2017-04", "2017-05"]


class TestGeoSplit:
    def test_midpoint(self):
        assert geo_split_icecream([0, 10, 2, 9]).requests == (C, V, C, V)

    def test_tie_goes_to_c(self):
        assert geo_split_icecream([0, 5, 10]).requests == (C, C, V)

    def test_two(self):
        assert geo_split_icecream([3.5, 7.25]).requests == (C, V)

    def test_degenerate(self):
        with pytest.raises(DegenerateGeo):
            geo_split_icecream([1, 1, 1])

    def test_median(self):
        assert geo_split_icecream([0, 1, 2, 100], rule="median").requests == (C, C, V, V)

    def test_from_table(self):
        table = parse_brightkite(FIXTURES / "brightkite_sample.tsv")
        insts = extract_bk_icecream_instances(table)
        assert len(insts) == 3 and all(V in i.requests and C in i.requests for i in insts)


class TestFetchCheck:
    def test_empty(self, tmp_path):
        assert datasets.fetch_check(tmp_path) == {"brightkite": None, "citi": []}

    def test_present(self, tmp_path):
        write(tmp_path / "loc-brightkite_totalCheckins.txt", bk_line("u", "a"))
        (tmp_path / "citi").mkdir()
        citi_csv(tmp_path / "citi" / "201701-citibike-tripdata.csv", [("2017-01-01 00:00:01", "72")])
        rep = datasets.fetch_check(tmp_path)
        assert rep["brightkite"].endswith("loc-brightkite_totalCheckins.txt") and len(rep["citi"]) == 1

    def test_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MTS_ORACLE_DATA", str(tmp_path))
        assert datasets.data_dir() == tmp_path
