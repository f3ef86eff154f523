"""File helpers for Coalesce."""

import os
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import TextIO, Union

PathLike = Union[str, Path]


@contextmanager
def atomic_writer(path: PathLike) -> Iterator[TextIO]:
    """Open a UTF-8, LF-terminated text file that appears only once fully written.

    Args:
        path: Destination file; parent directories are created

    Yields:
        Writable text handle on a temporary file next to the destination
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
        os.replace(temp_name, path)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write text atomically and return the destination path."""
    with atomic_writer(path) as handle:
        handle.write(text)
    return Path(path)
