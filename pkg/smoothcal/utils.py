import csv
import json
import logging
import math
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from smoothcal.constants import RHO_HAT_HEADER, SCHEMA_TAG
from smoothcal.errors import ConfigError, CsvParseError
from smoothcal.models import RhoHatTrajectory

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Render a cell: ints as ints, floats with repr round-trip precision."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return repr(value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
              comments: Optional[Dict[str, Any]] = None) -> str:
    """Write a versioned CSV: schema line, optional '# key=value' lines, header, rows."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        handle.write(SCHEMA_TAG + '\n')
        for key, value in (comments or {}).items():
            handle.write(f'# {key}={format_value(value)}\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(cell) for cell in row])
    logger.info(f"Wrote {path}")
    return path


def write_dict_rows(path: str, rows: List[Dict[str, Any]], comments: Optional[Dict[str, Any]] = None) -> str:
    header = list(rows[0].keys()) if rows else []
    return write_csv(path, header, ([row.get(col, '') for col in header] for row in rows), comments)


def read_csv(path: str):
    """Return (comments, header, rows with their line numbers)."""
    comments: Dict[str, str] = {}
    header = None
    rows = []
    with open(path, newline='', encoding='utf-8') as handle:
        for line_no, line in enumerate(handle, start=1):
            text = line.rstrip('\r\n')
            if not text.strip():
                continue
            if text.startswith('#'):
                if header is None and '=' in text:
                    key, _, value = text[1:].partition('=')
                    comments[key.strip()] = value.strip()
                continue
            cells = next(csv.reader([text]))
            if header is None:
                header = [cell.strip() for cell in cells]
            else:
                rows.append((line_no, cells))
    if header is None:
        raise CsvParseError('missing header row', line=1)
    return comments, header, rows


def read_rho_hat_csv(path: str) -> RhoHatTrajectory:
    """Parse a trajectory file with header 'N,rho_hat' (extra columns are ignored)."""
    comments, header, rows = read_csv(path)
    if tuple(header[:2]) != RHO_HAT_HEADER:
        raise CsvParseError(f"expected header starting with {','.join(RHO_HAT_HEADER)}, got {','.join(header)}",
                            line=_header_line(path))
    Ns, values = [], []
    for line_no, cells in rows:
        if len(cells) < 2:
            raise CsvParseError(f'expected 2 columns, got {len(cells)}', line=line_no)
        try:
            N = int(cells[0])
            value = float(cells[1])
        except ValueError:
            raise CsvParseError(f'could not parse {cells[0]!r}, {cells[1]!r} as (integer, float)', line=line_no) from None
        if N < 1 or (Ns and N <= Ns[-1]):
            raise CsvParseError(f'N must be positive and strictly increasing, got {N}', line=line_no)
        if not math.isfinite(value):
            raise CsvParseError(f'rho_hat must be finite, got {cells[1]!r}', line=line_no)
        Ns.append(N)
        values.append(value)
    if not Ns:
        raise CsvParseError('no data rows', line=_header_line(path))
    n = comments.get('n')
    try:
        n = int(n) if n is not None else None
    except ValueError:
        raise CsvParseError(f'could not parse sample size comment n={n!r}') from None
    return RhoHatTrajectory(np.array(Ns), np.array(values), n=n, problem=comments.get('problem'))


def _header_line(path):
    with open(path, encoding='utf-8') as handle:
        for line_no, line in enumerate(handle, start=1):
            if line.strip() and not line.startswith('#'):
                return line_no
    return 1


def load_json(path: str) -> Dict[str, Any]:
    """Read a UTF-8 JSON config document."""
    with open(path, encoding='utf-8') as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as e:
            raise ConfigError(f'{path} is not valid JSON: {e}') from e
