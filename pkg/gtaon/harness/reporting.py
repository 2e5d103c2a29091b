"""Writing results: versioned CSV, metadata and JSON summaries.

Every CSV starts with the schema line ``#gt-aon-v1``. Timestamps and
wall-times never enter a CSV; they go to ``<path>.meta.json`` so that
reruns with the same seed give byte-identical CSV files. All files are
written to a temporary sibling and moved into place with `os.replace`.
"""
import contextlib
import datetime
import io
import json
import logging
import os
import platform

import pandas as pd

from gtaon.exceptions import SerializationError


logger = logging.getLogger(__name__)

SCHEMA_LINE = "#gt-aon-v1"


@contextlib.contextmanager
def atomic_open(path, mode="w"):
    """Open a temporary sibling of `path`; move it into place on success.

    On error the temporary file is removed and `path` is left untouched.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = "{}.tmp.{}".format(path, os.getpid())
    try:
        with open(tmp, mode) as f:
            yield f
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def frame_to_csv_text(frame):
    buf = io.StringIO()
    buf.write(SCHEMA_LINE + "\n")
    frame.to_csv(buf, index=False, float_format="%.10g")
    return buf.getvalue().replace("\r\n", "\n")


def write_csv(frame, path):
    """Write a data frame as a versioned CSV."""
    text = frame_to_csv_text(frame)
    with atomic_open(path) as f:
        f.write(text)
    logger.info("csv_written path=%s rows=%d", path, len(frame))
    return path


def read_csv(path):
    """Read a CSV written by `write_csv`.

    Raises
    ------
    SerializationError
        If the file does not exist or lacks the schema line.
    """
    if not os.path.isfile(path):
        raise SerializationError(
            "Error loading results: file '{}' does not exist!".format(path))
    with open(path, "r") as f:
        first = f.readline().rstrip("\n")
        if first != SCHEMA_LINE:
            raise SerializationError(
                "File '{}' starts with '{}', expected '{}'".format(
                    path, first, SCHEMA_LINE))
        return pd.read_csv(f)


def meta_path(path):
    return path + ".meta.json"


def write_meta(path, meta):
    """Write the metadata sibling of a result file, with a timestamp."""
    j_data = dict(meta)
    j_data["created"] = datetime.datetime.now(
        datetime.timezone.utc).isoformat()
    j_data["python"] = platform.python_version()
    j_data["schema"] = SCHEMA_LINE.lstrip("#")
    write_json(j_data, meta_path(path))
    return meta_path(path)


def _native(value):
    """JSON fallback for numpy scalars and arrays."""
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(
        "Object of type {} is not JSON serializable".format(
            type(value).__name__))


def write_json(j_data, path):
    """Write a JSON summary."""
    with atomic_open(path) as f:
        json.dump(j_data, f, indent=2, sort_keys=True, default=_native)
        f.write("\n")
    return path


def dumps(j_data):
    """Serialise a summary for standard output."""
    return json.dumps(j_data, indent=2, sort_keys=True, default=_native)
