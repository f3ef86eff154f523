"""Tests for event file serialization."""

import io
import json
from pathlib import Path

import pytest

from coalesce.errors import EventFileError, SchemaVersionError
from coalesce.simulation.acquisition import generate
from coalesce.simulation.eventfile import deserialize, serialize
from coalesce.simulation.models import EventRecord, EventStream, StreamHeader
from coalesce.theory.models import CrystalConfig

from tests.conftest import make_run

HEADER = '#{"schema": "coalesce-events", "version": 1}\n'


def _parse(text: str) -> EventStream:
    return deserialize(io.StringIO(text))


class TestSerialize:
    """Test serialize and deserialize."""

    def test_byte_identical_reserialization(self, crystal: CrystalConfig) -> None:
        """Reading and writing again reproduces the file byte for byte."""
        stream = generate(make_run(crystal, pair_count=500, eta=0.5, fwhm=0.25))
        first = io.StringIO()
        serialize(stream, first)
        second = io.StringIO()
        serialize(deserialize(io.StringIO(first.getvalue())), second)
        assert second.getvalue() == first.getvalue()

    def test_line_layout(self) -> None:
        """Rows are tab-separated with six energy decimals."""
        stream = EventStream.from_records(
            [
                EventRecord(t_ns=12, det="A", energy_ev=1.766, n_inferred=1),
                EventRecord(t_ns=12, det="B", energy_ev=3.5, n_inferred=2),
            ]
        )
        buffer = io.StringIO()
        serialize(stream, buffer)
        lines = buffer.getvalue().split("\n")
        assert lines[0].startswith("#")
        assert json.loads(lines[0][1:])["schema"] == "coalesce-events"
        assert lines[1] == "12\tA\t1.766000\t1"
        assert lines[2] == "12\tB\t3.500000\t2"
        assert lines[3] == ""

    def test_header_keeps_config(self, crystal: CrystalConfig, tmp_path: Path) -> None:
        """The run config survives the file."""
        config = make_run(crystal, pair_count=50)
        path = tmp_path / "events.tsv"
        serialize(generate(config), path)
        restored = deserialize(path)
        assert restored.header.config == config
        assert restored.header.pairs == 50

    def test_empty_stream(self) -> None:
        """A header-only file is an empty stream."""
        stream = _parse(HEADER)
        assert len(stream) == 0
        assert stream.header.pairs is None

    def test_records(self) -> None:
        """Rows come back as event records."""
        stream = _parse(HEADER + "5\tA\t1.700000\t1\n9\tB\t0.000000\t0\n")
        assert list(stream.records()) == [
            EventRecord(t_ns=5, det="A", energy_ev=1.7, n_inferred=1),
            EventRecord(t_ns=9, det="B", energy_ev=0.0, n_inferred=0),
        ]

    def test_unterminated_last_line(self) -> None:
        """A final row without a newline is accepted."""
        assert len(_parse(HEADER + "5\tA\t1.700000\t1")) == 1

    def test_path_written_atomically(self, tmp_path: Path) -> None:
        """Writing to a path leaves no temporary files behind."""
        path = tmp_path / "events.tsv"
        serialize(EventStream(header=StreamHeader(pairs=0)), path)
        assert [p.name for p in tmp_path.iterdir()] == ["events.tsv"]


class TestMalformed:
    """Test deserialize on malformed input."""

    def test_negative_timestamp(self) -> None:
        """A negative timestamp names its line."""
        with pytest.raises(EventFileError) as excinfo:
            _parse(HEADER + "5\tA\t1.700000\t1\n-3\tB\t1.700000\t1\n")
        assert excinfo.value.line_number == 3
        assert "line 3" in str(excinfo.value)

    def test_out_of_order(self) -> None:
        """Timestamps must not decrease."""
        with pytest.raises(EventFileError) as excinfo:
            _parse(HEADER + "9\tA\t1.700000\t1\n5\tB\t1.700000\t1\n")
        assert excinfo.value.line_number == 3

    @pytest.mark.parametrize(
        "row",
        [
            "5\tC\t1.700000\t1",
            "5\tA\t1.700000",
            "5\tA\t1.700000\t1\textra",
            "5\tA\tabc\t1",
            "5\tA\t-1.000000\t1",
            "5\tA\tnan\t1",
            "5\tA\t1.700000\t-1",
            "5 \tA\t1.700000\t1",
        ],
    )
    def test_bad_rows(self, row: str) -> None:
        """Malformed rows raise with their line number."""
        with pytest.raises(EventFileError) as excinfo:
            _parse(HEADER + row + "\n")
        assert excinfo.value.line_number == 2

    def test_schema_version(self) -> None:
        """Another schema version is refused."""
        with pytest.raises(SchemaVersionError):
            _parse('#{"schema": "coalesce-events", "version": 2}\n')

    def test_foreign_header(self) -> None:
        """Files of another schema are refused."""
        with pytest.raises(EventFileError, match="not a coalesce event file"):
            _parse('#{"schema": "other", "version": 1}\n')

    def test_missing_header(self) -> None:
        """The first line must be the header."""
        with pytest.raises(EventFileError) as excinfo:
            _parse("5\tA\t1.700000\t1\n")
        assert excinfo.value.line_number == 1

    def test_empty_file(self) -> None:
        """An empty file has no header."""
        with pytest.raises(EventFileError, match="empty file"):
            _parse("")

    def test_path_in_message(self, tmp_path: Path) -> None:
        """Errors name the file."""
        path = tmp_path / "bad.tsv"
        path.write_text(HEADER + "x\tA\t1.0\t1\n", encoding="utf-8")
        with pytest.raises(EventFileError, match="bad.tsv:2"):
            deserialize(path)

    def test_invalid_utf8(self, tmp_path: Path) -> None:
        """Undecodable bytes name the file and line."""
        path = tmp_path / "bad.tsv"
        path.write_bytes(HEADER.encode() + b"10\tA\t1.766000\t1\n\xff\xfe\tA\t1.0\t1\n")
        with pytest.raises(EventFileError, match="bad.tsv:3: invalid UTF-8") as excinfo:
            deserialize(path)
        assert excinfo.value.line_number == 3

    def test_invalid_utf8_header(self, tmp_path: Path) -> None:
        """A binary header is reported on line 1."""
        path = tmp_path / "bad.tsv"
        path.write_bytes(b"\xff#{}\n")
        with pytest.raises(EventFileError) as excinfo:
            deserialize(path)
        assert excinfo.value.line_number == 1

    def test_binary_handle(self) -> None:
        """Binary handles parse like paths."""
        stream = deserialize(io.BytesIO((HEADER + "5\tA\t1.766000\t1\n").encode()))
        assert len(stream) == 1
