"""CSV files of spectral fields

Layout::

    # key=value            (any number of comment lines)
    xi_1,...,xi_d,component,re,im
    -R,...,-R,0,<re>,<im>
    ...

One row per (xi, component), frequencies in the enumeration order of
``FrequencyGrid``, components zero-based, values with 17 significant digits.
"""

import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from ..errors import InvalidArgumentError
from ..spectral.field import SpectralField, check_hermitian
from ..spectral.grid import FrequencyGrid

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "{:.17g}"


def format_float(value: float) -> str:
    return FLOAT_FORMAT.format(value)


def format_header(meta: Optional[Mapping[str, Any]]) -> str:
    """``# key=value`` lines echoing a configuration"""
    if not meta:
        return ""
    return "".join(f"# {key}={value}\n" for key, value in meta.items())


def atomic_write_text(path: Union[Path, str], text: str) -> Path:
    """Write to a temporary file in the target directory, then rename"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except Exception:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.info(f"Wrote {path}")
    return path


def write_rows(
    path: Union[Path, str],
    columns: List[str],
    rows: List[List[Any]],
    meta: Optional[Mapping[str, Any]] = None,
) -> Path:
    """CSV with a comment header; floats at full precision"""
    buffer = io.StringIO()
    buffer.write(format_header(meta))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(
            [format_float(v) if isinstance(v, (float, np.floating)) else v for v in row]
        )
    return atomic_write_text(path, buffer.getvalue())


def write_field_csv(
    field: SpectralField, path: Union[Path, str], meta: Optional[Mapping[str, Any]] = None
) -> Path:
    d = field.d
    columns = [f"xi_{k + 1}" for k in range(d)] + ["component", "re", "im"]
    freqs = field.grid.frequencies()
    rows = []
    for idx in range(field.grid.size):
        xi = [int(v) for v in freqs[idx]]
        for comp in range(field.ncomp):
            value = field.coeffs[comp, idx]
            rows.append(xi + [comp, float(value.real), float(value.imag)])
    return write_rows(path, columns, rows, meta)


def read_csv_header(path: Union[Path, str]) -> Dict[str, str]:
    """The ``# key=value`` comment lines of a CSV file"""
    meta = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, sep, value = line[1:].strip().partition("=")
            if sep:
                meta[key.strip()] = value.strip()
    return meta


def _parse_rows(path: Path) -> Tuple[List[str], List[List[str]]]:
    with open(path, encoding="utf-8", newline="") as f:
        lines = [line for line in f if line.strip() and not line.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise InvalidArgumentError(f"{path}: no header row") from None
    return [h.strip() for h in header], list(reader)


def read_field_csv(path: Union[Path, str], check_symmetry: bool = True) -> SpectralField:
    """Parse a field file; the cutoff is the largest |xi|_inf present

    Every (xi, component) pair of the grid must appear exactly once. Files
    that break Hermitian symmetry raise SymmetryError unless
    ``check_symmetry`` is off.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Field file not found: {path}")
    header, rows = _parse_rows(path)
    d = len(header) - 3
    expected = [f"xi_{k + 1}" for k in range(d)] + ["component", "re", "im"]
    if d < 1 or header != expected:
        raise InvalidArgumentError(f"{path}: unexpected header {','.join(header)}")
    if not rows:
        raise InvalidArgumentError(f"{path}: no coefficient rows")

    try:
        parsed = [
            (tuple(int(v) for v in row[:d]), int(row[d]), complex(float(row[d + 1]), float(row[d + 2])))
            for row in rows
        ]
    except (ValueError, IndexError) as e:
        raise InvalidArgumentError(f"{path}: malformed row ({e})") from e

    R = max(max(abs(v) for v in xi) for xi, _, _ in parsed)
    ncomp = max(comp for _, comp, _ in parsed) + 1
    if min(comp for _, comp, _ in parsed) < 0:
        raise InvalidArgumentError(f"{path}: negative component index")
    grid = FrequencyGrid(d=d, R=R)
    coeffs = np.zeros((ncomp, grid.size), dtype=complex)
    seen = np.zeros((ncomp, grid.size), dtype=bool)
    for xi, comp, value in parsed:
        idx = grid.enumerate(xi)
        if seen[comp, idx]:
            raise InvalidArgumentError(f"{path}: duplicate row for xi={xi}, component {comp}")
        seen[comp, idx] = True
        coeffs[comp, idx] = value
    if not seen.all():
        raise InvalidArgumentError(
            f"{path}: {int((~seen).sum())} of {seen.size} coefficients missing"
        )
    field = SpectralField(grid=grid, coeffs=coeffs)
    if not field.is_finite():
        raise InvalidArgumentError(f"{path}: non-finite coefficients")
    if check_symmetry:
        check_hermitian(field)
    logger.info(f"Read field d={d} R={R} ncomp={ncomp} from {path}")
    return field
