"""
Text formats for signals, images and transport maps.

Every block starts with a '#' header line naming the grid, followed by one CSV
row per node. Floats are written with 17 significant digits so files
round-trip exactly and repeated runs are byte-identical.
"""

import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from signal_core.density import Image2D, Signal1D, normalize
from signal_core.errors import GridError, SignalFormatError
from signal_core.grid import Grid1D, Grid2D

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def fmt(value: float) -> str:
    return FLOAT_FORMAT % value


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    Write text to path through a temporary file and an atomic rename.

    Args:
        path: Destination file
        text: Full file content

    Returns:
        The destination path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug(f"Wrote {path}")
    return path


def rows_to_csv(rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue()


def _grid1d_header(tag: str, grid: Grid1D) -> str:
    return f"# {tag} {fmt(grid.xmin)} {fmt(grid.xmax)} {grid.n}\n"


def _grid2d_header(tag: str, grid: Grid2D) -> str:
    return (f"# {tag} {fmt(grid.xmin)} {fmt(grid.xmax)} {grid.nx} "
            f"{fmt(grid.ymin)} {fmt(grid.ymax)} {grid.ny}\n")


def format_signal(p: Signal1D) -> str:
    rows = zip(p.grid.nodes.tolist(), p.values.tolist())
    return _grid1d_header("grid1d", p.grid) + rows_to_csv(rows)


def format_map1d(grid: Grid1D, values: np.ndarray) -> str:
    rows = zip(grid.nodes.tolist(), np.asarray(values, dtype=float).tolist())
    return _grid1d_header("tmap1d", grid) + rows_to_csv(rows)


def format_image(img: Image2D) -> str:
    X, Y = img.grid.mesh()
    rows = zip(X.ravel().tolist(), Y.ravel().tolist(), img.values.ravel().tolist())
    return _grid2d_header("grid2d", img.grid) + rows_to_csv(rows)


def format_map2d(grid: Grid2D, values: np.ndarray) -> str:
    X, Y = grid.mesh()
    values = np.asarray(values, dtype=float)
    rows = zip(X.ravel().tolist(), Y.ravel().tolist(),
               values[..., 0].ravel().tolist(), values[..., 1].ravel().tolist())
    return _grid2d_header("tmap2d", grid) + rows_to_csv(rows)


def format_angle_blocks(angles: Sequence[float], grid: Grid1D, maps: Sequence[np.ndarray]) -> str:
    parts = []
    for theta, values in zip(angles, maps):
        parts.append(f"# angle {fmt(theta)}\n")
        parts.append(format_map1d(grid, values))
    return "".join(parts)


def _parse_header(line: str, tag: str, count: int) -> List[str]:
    fields = line.strip().lstrip("#").split()
    if not fields or fields[0] != tag or len(fields) != count + 1:
        raise SignalFormatError(f"Expected '# {tag}' header with {count} fields, got {line.strip()!r}")
    return fields[1:]


def _parse_rows(lines: Sequence[str], width: int) -> np.ndarray:
    try:
        rows = [[float(v) for v in row] for row in csv.reader(lines) if row]
    except ValueError as e:
        raise SignalFormatError(f"Non-numeric value in data rows: {e}")
    if any(len(row) != width for row in rows):
        raise SignalFormatError(f"Every data row must have {width} columns")
    return np.array(rows, dtype=float).reshape(-1, width)


def _read_grid1d_block(lines: Sequence[str], tag: str) -> Tuple[Grid1D, np.ndarray]:
    if not lines:
        raise SignalFormatError("Empty input")
    fields = _parse_header(lines[0], tag, 3)
    try:
        grid = Grid1D(float(fields[0]), float(fields[1]), int(fields[2]))
    except (ValueError, GridError) as e:
        raise SignalFormatError(f"Invalid grid header: {e}")
    data = _parse_rows(lines[1:], 2)
    if data.shape[0] != grid.n:
        raise SignalFormatError(f"Header announces {grid.n} rows, found {data.shape[0]}")
    if np.max(np.abs(data[:, 0] - grid.nodes)) > 1e-9 * max(1.0, grid.xmax - grid.xmin):
        raise SignalFormatError("Node column does not match the header grid")
    return grid, data[:, 1]


def parse_signal(text: str) -> Signal1D:
    """
    Parse a '# grid1d' block and normalize the samples.

    Raises:
        SignalFormatError: On malformed header or rows
    """
    grid, values = _read_grid1d_block(text.splitlines(), "grid1d")
    return normalize(values, grid)


def parse_map1d(text: str) -> Tuple[Grid1D, np.ndarray]:
    return _read_grid1d_block(text.splitlines(), "tmap1d")


def parse_image(text: str) -> Tuple[Grid2D, np.ndarray]:
    """Parse a '# grid2d' block into raw samples (not normalized) and its grid."""
    lines = text.splitlines()
    if not lines:
        raise SignalFormatError("Empty input")
    fields = _parse_header(lines[0], "grid2d", 6)
    try:
        grid = Grid2D(float(fields[0]), float(fields[1]), int(fields[2]),
                      float(fields[3]), float(fields[4]), int(fields[5]))
    except (ValueError, GridError) as e:
        raise SignalFormatError(f"Invalid grid header: {e}")
    data = _parse_rows(lines[1:], 3)
    if data.shape[0] != grid.nx * grid.ny:
        raise SignalFormatError(f"Header announces {grid.nx * grid.ny} rows, found {data.shape[0]}")
    return grid, data[:, 2].reshape(grid.shape)


def read_signal(path: Union[str, Path]) -> Signal1D:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SignalFormatError(f"Cannot read signal file {path}: {e}")
    return parse_signal(text)


def write_signal(path: Union[str, Path], p: Signal1D) -> Path:
    return atomic_write_text(path, format_signal(p))


def write_map1d(path: Union[str, Path], grid: Grid1D, values: np.ndarray) -> Path:
    return atomic_write_text(path, format_map1d(grid, values))
