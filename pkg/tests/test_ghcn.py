import gzip
from datetime import date, datetime

import pytest
from hypothesis import given, strategies as st

from weatherfusion import ghcn
from weatherfusion.errors import CorruptGzipError, MalformedError, YearRangeError


def test_build_year_url():
    assert (
        ghcn.build_year_url(2017)
        == "https://www1.ncdc.noaa.gov/pub/data/ghcn/daily/by_year/2017.csv.gz"
    )
    assert ghcn.build_year_url(1763).endswith("/by_year/1763.csv.gz")


def test_build_year_url_range():
    with pytest.raises(YearRangeError):
        ghcn.build_year_url(99999)
    with pytest.raises(YearRangeError):
        ghcn.build_year_url(1762)
    with pytest.raises(YearRangeError):
        ghcn.build_year_url(datetime.now().year + 1)


def test_build_year_url_pure():
    assert ghcn.build_year_url(1990) == ghcn.build_year_url(1990)


def test_parse_daily_record_full():
    obs = ghcn.parse_daily_record("CA007020860,20170101,TMIN,-250,,,C,0700")
    assert obs.station_id == "CA007020860"
    assert obs.date == date(2017, 1, 1)
    assert obs.element == "TMIN"
    assert obs.value == -250
    assert obs.m_flag is None and obs.q_flag is None and obs.s_flag == "C"
    assert obs.obs_time == "0700"


def test_parse_daily_record_absent_fields():
    obs = ghcn.parse_daily_record("JOM00040250,20180615,PRCP,0,,,S,")
    assert obs.value == 0 and obs.obs_time is None


@pytest.mark.parametrize(
    "line",
    [
        "X,20170101,TMIN",
        "SHORT,20170101,TMIN,5,,,S,",
        "CA007020860,20171301,TMIN,5,,,S,",
        "CA007020860,20170101,TMIN,abc,,,S,",
        "CA007020860,20170101,TMIN,5,XX,,S,",
        "CA007020860,20170101,TMIN,5,,,S,7am2",
    ],
)
def test_parse_daily_record_malformed(line):
    with pytest.raises(MalformedError):
        ghcn.parse_daily_record(line)


def test_round_trip_sampled_year_file(tmp_path):
    csv = ghcn.decompress_gz(ghcn.packaged_sample_gz(), tmp_path)
    count = 0
    with open(csv, encoding="utf-8") as fh:
        for line in fh:
            obs = ghcn.parse_daily_record(line)
            again = ghcn.parse_daily_record(obs.to_csv_line())
            assert again == obs
            count += 1
            if count >= 5000:
                break
    assert count == 5000


def test_full_file_parse_reports_zero_malformed(tmp_path):
    csv = ghcn.decompress_gz(ghcn.packaged_sample_gz(), tmp_path)
    stats = ghcn.ParseStats()
    with open(csv, encoding="utf-8") as fh:
        total = sum(1 for _ in ghcn.iter_observations(fh, stats))
    assert stats.malformed == 0
    assert stats.retained == total
    assert stats.quality_flagged > 0  # sample carries a few flagged rows
    assert stats.untracked_element > 0


def test_iter_observations_counts_and_skips():
    lines = [
        "CA007020860,20170101,TMIN,-250,,,C,0700",
        "CA007020860,20170101,TOBS,-100,,,C,0700",  # untracked element
        "CA007020860,20170102,TMIN,-240,,X,C,0700",  # quality flagged
        "garbage line",
    ]
    stats = ghcn.ParseStats()
    kept = list(ghcn.iter_observations(lines, stats))
    assert len(kept) == 1
    assert stats.malformed == 1
    assert stats.quality_flagged == 1
    assert stats.untracked_element == 1


def test_iter_observations_can_keep_quality_flagged():
    lines = ["CA007020860,20170102,TMIN,-240,,X,C,0700"]
    kept = list(ghcn.iter_observations(lines, drop_quality_flagged=False))
    assert len(kept) == 1 and kept[0].q_flag == "X"


@given(
    st.text(alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789", min_size=11, max_size=11),
    st.integers(-9999, 9999),
    st.sampled_from(ghcn.CORE_ELEMENTS),
)
def test_round_trip_property(station, value, element):
    obs = ghcn.RawObservation(station, date(2017, 3, 14), element, value, None, None, "S", "0712")
    assert ghcn.parse_daily_record(obs.to_csv_line()) == obs


def test_decompress_gz(tmp_path):
    src = tmp_path / "x.csv.gz"
    with gzip.open(src, "wb") as fh:
        fh.write(b"hello,world\n")
    out = ghcn.decompress_gz(src, tmp_path / "out")
    assert out.read_bytes() == b"hello,world\n"


def test_decompress_gz_empty_payload(tmp_path):
    src = tmp_path / "e.csv.gz"
    with gzip.open(src, "wb") as fh:
        fh.write(b"")
    out = ghcn.decompress_gz(src, tmp_path)
    assert out.stat().st_size == 0


def test_decompress_gz_truncated(tmp_path):
    src = tmp_path / "t.csv.gz"
    with gzip.open(src, "wb") as fh:
        fh.write(b"x" * 100000)
    data = src.read_bytes()
    src.write_bytes(data[: len(data) // 2])
    with pytest.raises(CorruptGzipError):
        ghcn.decompress_gz(src, tmp_path / "out")
    assert not (tmp_path / "out" / "t.csv").exists()


def test_decompress_gz_not_gzip(tmp_path):
    src = tmp_path / "n.csv.gz"
    src.write_bytes(b"plain text, definitely not gzip")
    with pytest.raises(CorruptGzipError):
        ghcn.decompress_gz(src, tmp_path)


def test_parse_station_line():
    line = "JOM00040250  32.5390   38.1950  686.0    H-4 AIR BASE                  "
    rec = ghcn.parse_station_line(line)
    assert rec.station_id == "JOM00040250"
    assert rec.latitude == 32.539
    assert rec.longitude == 38.195
    assert rec.elevation == 686.0
    assert rec.name == "H-4 AIR BASE"


def test_parse_station_line_missing_elevation():
    line = "USW00000001  40.0000  -75.0000 -999.9    NOWHERE                       "
    rec = ghcn.parse_station_line(line)
    assert rec.elevation is None


def test_parse_station_line_too_short():
    with pytest.raises(MalformedError):
        ghcn.parse_station_line("USW0000001")


def test_parse_station_line_out_of_range():
    line = "USW00000001  95.0000  -75.0000  100.0    BAD LATITUDE                  "
    with pytest.raises(MalformedError):
        ghcn.parse_station_line(line)


@pytest.fixture
def local_archive(tmp_path, monkeypatch):
    """Serve a tiny gzipped by-year payload over a local HTTP server."""
    import http.server
    import threading

    payload_dir = tmp_path / "srv"
    payload_dir.mkdir()
    body = b"CA007020860,20170101,TMIN,-250,,,C,0700\n" * 200
    with gzip.open(payload_dir / "2017.csv.gz", "wb") as fh:
        fh.write(body)

    class Handler(http.server.SimpleHTTPRequestHandler):
        def __init__(self, *args, **kwargs):
            super().__init__(*args, directory=str(payload_dir), **kwargs)

        def log_message(self, *args):
            pass

    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    port = server.server_address[1]
    monkeypatch.setattr(ghcn, "BY_YEAR_URL", f"http://127.0.0.1:{port}/{{year}}.csv.gz")
    yield body
    server.shutdown()


def test_download_year_success_and_progress(tmp_path, local_archive):
    seen = []
    yf = ghcn.download_year(2017, tmp_path / "dl", progress_sink=seen.append)
    assert yf.compressed_path.exists()
    assert yf.compressed_bytes == yf.compressed_path.stat().st_size
    assert seen[0] == 0 and seen[-1] == 100
    assert all(b >= a for a, b in zip(seen, seen[1:]))
    out = ghcn.decompress_gz(yf.compressed_path, tmp_path / "csv")
    assert out.read_bytes() == local_archive


def test_download_year_overwrites_idempotently(tmp_path, local_archive):
    first = ghcn.download_year(2017, tmp_path / "dl")
    second = ghcn.download_year(2017, tmp_path / "dl")
    assert first.compressed_path == second.compressed_path
    assert first.compressed_bytes == second.compressed_bytes


def test_download_year_rejects_bad_year(tmp_path):
    with pytest.raises(YearRangeError):
        ghcn.download_year(99999, tmp_path)


def test_download_year_network_failure_leaves_no_file(tmp_path, monkeypatch):
    monkeypatch.setattr(ghcn, "BY_YEAR_URL", "http://127.0.0.1:1/unreachable/{year}.csv.gz")
    from weatherfusion.errors import NetworkError

    with pytest.raises(NetworkError):
        ghcn.download_year(2017, tmp_path)
    assert list(tmp_path.iterdir()) == []
