"""Line-delimited event files.

Layout::

    #{"schema": "coalesce-events", "version": 1, "pairs": ..., "config": {...}}
    t_ns<TAB>det<TAB>energy_eV<TAB>n_inferred

Timestamps are integer nanoseconds, energies carry six decimals, text is UTF-8
with LF line endings.
"""

import json
import math
from pathlib import Path
from typing import BinaryIO, Optional, TextIO, Union

import numpy as np
from pydantic import ValidationError

from coalesce.errors import EventFileError, SchemaVersionError
from coalesce.simulation.models import (
    DETECTOR_IDS,
    EVENT_SCHEMA,
    EVENT_SCHEMA_VERSION,
    EventStream,
    StreamHeader,
)
from coalesce.utils.files import atomic_writer
from coalesce.utils.logging import get_logger

logger = get_logger(__name__)

HEADER_PREFIX = "#"
FIELD_COUNT = 4
WRITE_CHUNK = 100_000

Destination = Union[str, Path, TextIO]
Source = Union[str, Path, TextIO, BinaryIO]


def _write(stream: EventStream, handle: TextIO) -> None:
    handle.write(HEADER_PREFIX + stream.header.model_dump_json(by_alias=True) + "\n")
    letters = np.array(DETECTOR_IDS)[stream.det]
    for start in range(0, len(stream), WRITE_CHUNK):
        stop = start + WRITE_CHUNK
        rows = zip(
            stream.t_ns[start:stop].tolist(),
            letters[start:stop].tolist(),
            stream.energy_ev[start:stop].tolist(),
            stream.n_inferred[start:stop].tolist(),
        )
        handle.write("".join(f"{t}\t{det}\t{energy:.6f}\t{n}\n" for t, det, energy, n in rows))


def serialize(stream: EventStream, destination: Destination) -> None:
    """Write an event stream.

    Args:
        stream: Event stream to write
        destination: File path (written atomically) or open text handle
    """
    if isinstance(destination, (str, Path)):
        with atomic_writer(destination) as handle:
            _write(stream, handle)
        logger.debug(f"Wrote {len(stream)} events to {destination}")
    else:
        _write(stream, destination)


def _parse_header(line: str, path: Optional[str]) -> StreamHeader:
    if not line.startswith(HEADER_PREFIX):
        raise EventFileError("missing header line", 1, path)
    try:
        raw = json.loads(line[len(HEADER_PREFIX) :])
    except json.JSONDecodeError as e:
        raise EventFileError(f"header is not valid JSON ({e.msg})", 1, path) from e
    if not isinstance(raw, dict) or raw.get("schema") != EVENT_SCHEMA:
        raise EventFileError("not a coalesce event file", 1, path)
    if raw.get("version") != EVENT_SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported schema version {raw.get('version')!r}, "
            f"expected {EVENT_SCHEMA_VERSION}",
            1,
            path,
        )
    try:
        return StreamHeader.model_validate(raw)
    except ValidationError as e:
        raise EventFileError(f"invalid header: {e}", 1, path) from e


def _decode(line: Union[str, bytes], number: int, path: Optional[str]) -> str:
    if isinstance(line, str):
        return line
    try:
        return line.decode("utf-8")
    except UnicodeDecodeError as e:
        raise EventFileError(f"invalid UTF-8 at byte {e.start}", number, path) from e


def _read(handle: Union[TextIO, BinaryIO], path: Optional[str]) -> EventStream:
    header_line = _decode(handle.readline(), 1, path)
    if not header_line:
        raise EventFileError("empty file", 1, path)
    header = _parse_header(header_line.rstrip("\n"), path)

    t_ns: list[int] = []
    det: list[int] = []
    energy_ev: list[float] = []
    n_inferred: list[int] = []
    previous = 0

    for number, raw_line in enumerate(handle, start=2):
        line = _decode(raw_line, number, path)
        text = line[:-1] if line.endswith("\n") else line
        fields = text.split("\t")
        if len(fields) != FIELD_COUNT or any(f != f.strip() or not f for f in fields):
            raise EventFileError(
                f"expected {FIELD_COUNT} tab-separated fields, got {text!r}", number, path
            )
        raw_t, raw_det, raw_energy, raw_n = fields
        try:
            t = int(raw_t)
            energy = float(raw_energy)
            n = int(raw_n)
        except ValueError as e:
            raise EventFileError(f"unparsable field ({e})", number, path) from e
        if t < 0:
            raise EventFileError(f"negative timestamp {t}", number, path)
        if t < previous:
            raise EventFileError(f"timestamp {t} precedes {previous}", number, path)
        if raw_det not in DETECTOR_IDS:
            raise EventFileError(f"unknown detector {raw_det!r}", number, path)
        if not math.isfinite(energy) or energy < 0:
            raise EventFileError(f"invalid energy {raw_energy}", number, path)
        if n < 0:
            raise EventFileError(f"negative photon count {n}", number, path)

        previous = t
        t_ns.append(t)
        det.append(DETECTOR_IDS.index(raw_det))
        energy_ev.append(energy)
        n_inferred.append(n)

    return EventStream(
        header=header, t_ns=t_ns, det=det, energy_ev=energy_ev, n_inferred=n_inferred
    )


def deserialize(source: Source) -> EventStream:
    """Read an event stream.

    Args:
        source: File path or open text or binary handle

    Returns:
        Parsed event stream

    Raises:
        EventFileError: On the first malformed line, naming its line number
        SchemaVersionError: If the header carries another schema version
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as handle:
            stream = _read(handle, str(source))
        logger.debug(f"Read {len(stream)} events from {source}")
        return stream
    return _read(source, getattr(source, "name", None))
