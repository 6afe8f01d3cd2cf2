"""File helpers for run outputs: atomic writes and content digests."""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from pathlib import Path

from pt_double_well.exceptions.output_errors import OutputError

logger = logging.getLogger(__name__)


def safe_write_text(file_path: Path, content: str) -> Path:
    """Write ``content`` through a temporary file in the same directory, then replace.

    Raises:
        OutputError: the directory or file cannot be written
    """
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{file_path.name}.", dir=file_path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(content)
            os.replace(tmp_name, file_path)
        except BaseException:
            Path(tmp_name).unlink(missing_ok=True)
            raise
    except PermissionError as e:
        raise OutputError(f"Permission denied writing {file_path}") from e
    except OSError as e:
        raise OutputError(f"OS error writing {file_path} - {e}") from e
    logger.debug("Wrote %s (%d bytes)", file_path, len(content))
    return file_path


def calculate_file_hash(file_path: Path, algorithm: str = "sha256", chunk_size: int = 8192) -> str:
    """Hex digest of the file content.

    Raises:
        OutputError: the file is missing or unreadable, or the algorithm is unknown
    """
    if not file_path.exists():
        raise OutputError(f"File does not exist: {file_path}")
    try:
        hasher = hashlib.new(algorithm)
        with open(file_path, "rb") as f:
            while chunk := f.read(chunk_size):
                hasher.update(chunk)
        return hasher.hexdigest()
    except OSError as e:
        raise OutputError(f"Cannot read file for hashing: {file_path} - {e}") from e
    except ValueError as e:
        raise OutputError(f"Invalid hash algorithm: {algorithm}") from e
