import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

logger = logging.getLogger(__name__)


def atomic_write_text(path: Path | str, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file in the same directory and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise

    logger.debug("Wrote %s (%d bytes)", path, len(text))
    return path


def dumps_json(document: Any) -> str:
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: Path | str, document: Any) -> Path:
    return atomic_write_text(path, dumps_json(document))


def format_float(value: float) -> str:
    return repr(float(value))


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(it) if isinstance(it, float) else it for it in row])
    return atomic_write_text(path, buffer.getvalue())


def sidecar_path(path: Path | str, suffix: str) -> Path:
    """``report.json`` -> ``report.<suffix>``."""
    path = Path(path)
    return path.with_name(f"{path.stem}.{suffix}")
