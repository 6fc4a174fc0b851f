import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, Union

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, content: str) -> None:
    """
    Write text through a temporary file in the target directory, then rename.

    An interrupted run leaves either the previous file or the new one, never a
    truncated file.

    Args:
        path (PathLike): Destination file
        content (str): Full file content
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        dir=str(target.parent), prefix=f".{target.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(content)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def atomic_write_jsonl(path: PathLike, records: Iterable[Dict[str, Any]]) -> None:
    """Write one compact JSON object per line, atomically"""
    lines = [
        json.dumps(record, ensure_ascii=False, sort_keys=False) + "\n"
        for record in records
    ]
    atomic_write_text(path, "".join(lines))


def atomic_write_json(path: PathLike, payload: Dict[str, Any]) -> None:
    """Write an indented JSON document, atomically"""
    atomic_write_text(path, json.dumps(payload, ensure_ascii=False, indent=2) + "\n")
