"""CSV schemas for count tables (ingestion and emission).

Four table kinds are supported, mirroring the shapes of the experimental
tables this toolkit analyzes:

* ``visibility``: thetaA_deg, thetaB_deg, Rc_cps, dRc_cps
* ``chsh``:       thetaA, thetaB, RA_cps, RB_cps, Rc_cps, dRc_cps
* ``freedman``:   thetaA, thetaB, phi_deg, RA, RB, Rc   (+ metadata n0c_cps)
* ``tomo``:       nu, label, hA_deg, qA_deg, hB_deg, qB_deg,
                  RA, dRA, RB, dRB, Rc, dRc

Files are UTF-8 with '.' decimal points.  Lines starting with '#' are
comments; metadata rides in comment lines of the form ``# key: value``.
Every kind requires ``integration_s`` and ``window_s``; ``freedman``
additionally requires ``n0c_cps``.  The column-header row is mandatory.
"""

from __future__ import annotations

import hashlib
import io
from pathlib import Path

from .bell import (
    ChshGrid,
    CountRow,
    FreedmanDataset,
    FreedmanRow,
    VisibilityRow,
    VisibilityTable,
)
from .jones import WaveplateSetting
from .tomography import TomographyDataset, TomographyRecord

__all__ = [
    "SchemaMismatch",
    "NegativeRate",
    "MissingHeaderKey",
    "KINDS",
    "parse_counts",
    "parse_counts_text",
    "format_counts",
    "sha256_digest",
]


class SchemaMismatch(ValueError):
    """File does not match the declared table kind (carries a line number)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NegativeRate(SchemaMismatch):
    """A rate column holds a negative value."""


class MissingHeaderKey(ValueError):
    """A required metadata key is absent from the '#' header lines."""


_COLUMNS = {
    "visibility": ("thetaA_deg", "thetaB_deg", "Rc_cps", "dRc_cps"),
    "chsh": ("thetaA", "thetaB", "RA_cps", "RB_cps", "Rc_cps", "dRc_cps"),
    "freedman": ("thetaA", "thetaB", "phi_deg", "RA", "RB", "Rc"),
    "tomo": (
        "nu", "label", "hA_deg", "qA_deg", "hB_deg", "qB_deg",
        "RA", "dRA", "RB", "dRB", "Rc", "dRc",
    ),
}
KINDS = tuple(_COLUMNS)

# columns that must parse as nonnegative rates
_RATE_COLUMNS = {
    "visibility": ("Rc_cps", "dRc_cps"),
    "chsh": ("RA_cps", "RB_cps", "Rc_cps", "dRc_cps"),
    "freedman": ("RA", "RB", "Rc"),
    "tomo": ("RA", "dRA", "RB", "dRB", "Rc", "dRc"),
}


def sha256_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _split_lines(text: str):
    meta: dict[str, str] = {}
    rows: list[tuple[int, list[str]]] = []
    header: tuple[int, list[str]] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if ":" in body:
                key, _, value = body.partition(":")
                key = key.strip()
                if key and " " not in key:
                    meta[key] = value.strip()
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            header = (lineno, cells)
        else:
            rows.append((lineno, cells))
    return meta, header, rows


def _require_meta(meta: dict, key: str, kind: str) -> float:
    if key not in meta:
        raise MissingHeaderKey(f"{kind} table is missing required metadata '# {key}: ...'")
    try:
        return float(meta[key])
    except ValueError as exc:
        raise MissingHeaderKey(f"metadata {key}={meta[key]!r} is not a number") from exc


def _parse_float(cells: list, names: tuple, col: str, lineno: int, kind: str) -> float:
    idx = names.index(col)
    raw = cells[idx]
    try:
        value = float(raw)
    except ValueError as exc:
        raise SchemaMismatch(f"column {col}: {raw!r} is not a number", lineno) from exc
    if col in _RATE_COLUMNS[kind] and value < 0:
        raise NegativeRate(f"column {col}: negative rate {value}", lineno)
    return value


def parse_counts_text(text: str, kind: str):
    """Parse raw CSV text into the typed dataset for ``kind``."""
    if kind not in _COLUMNS:
        raise ValueError(f"unknown table kind {kind!r}; expected one of {KINDS}")
    expected = _COLUMNS[kind]
    meta, header, rows = _split_lines(text)
    if header is None:
        raise SchemaMismatch(f"empty file: no header row for kind {kind!r}")
    hline, names = header
    if tuple(names) != expected:
        raise SchemaMismatch(
            f"header {','.join(names)!r} does not match {kind} schema {','.join(expected)!r}",
            hline,
        )
    if not rows:
        raise SchemaMismatch("no data rows", hline)
    for lineno, cells in rows:
        if len(cells) != len(expected):
            raise SchemaMismatch(
                f"expected {len(expected)} columns, got {len(cells)}", lineno
            )

    integration = _require_meta(meta, "integration_s", kind)
    window = _require_meta(meta, "window_s", kind)

    def f(cells, col, lineno):
        return _parse_float(cells, expected, col, lineno, kind)

    if kind == "visibility":
        vrows = tuple(
            VisibilityRow(
                theta_a=f(c, "thetaA_deg", ln),
                theta_b=f(c, "thetaB_deg", ln),
                rate=f(c, "Rc_cps", ln),
                d_rate=f(c, "dRc_cps", ln),
            )
            for ln, c in rows
        )
        return VisibilityTable(rows=vrows, integration_s=integration, window_s=window)

    if kind == "chsh":
        crows = tuple(
            CountRow(
                theta_a=f(c, "thetaA", ln),
                theta_b=f(c, "thetaB", ln),
                singles_a=f(c, "RA_cps", ln),
                singles_b=f(c, "RB_cps", ln),
                rate=f(c, "Rc_cps", ln),
                d_rate=f(c, "dRc_cps", ln),
            )
            for ln, c in rows
        )
        return ChshGrid(rows=crows, integration_s=integration, window_s=window)

    if kind == "freedman":
        n0c = _require_meta(meta, "n0c_cps", kind)
        frows = tuple(
            FreedmanRow(
                theta_a=f(c, "thetaA", ln),
                theta_b=f(c, "thetaB", ln),
                phi=f(c, "phi_deg", ln),
                singles_a=f(c, "RA", ln),
                singles_b=f(c, "RB", ln),
                rate=f(c, "Rc", ln),
            )
            for ln, c in rows
        )
        return FreedmanDataset(rows=frows, n0c=n0c, integration_s=integration, window_s=window)

    # tomo
    records = []
    for ln, c in rows:
        try:
            nu = int(c[expected.index("nu")])
        except ValueError as exc:
            raise SchemaMismatch(f"column nu: {c[0]!r} is not an integer", ln) from exc
        records.append(
            TomographyRecord(
                nu=nu,
                label=c[expected.index("label")],
                arm_a=WaveplateSetting(f(c, "hA_deg", ln), f(c, "qA_deg", ln)),
                arm_b=WaveplateSetting(f(c, "hB_deg", ln), f(c, "qB_deg", ln)),
                singles_a=f(c, "RA", ln),
                d_singles_a=f(c, "dRA", ln),
                singles_b=f(c, "RB", ln),
                d_singles_b=f(c, "dRB", ln),
                coincidences=f(c, "Rc", ln),
                d_coincidences=f(c, "dRc", ln),
            )
        )
    try:
        return TomographyDataset(
            records=tuple(records), integration_s=integration, window_s=window
        )
    except Exception as exc:
        raise SchemaMismatch(str(exc)) from exc


def parse_counts(path, kind: str):
    """Parse a CSV file (path or '-' style file object) into a typed dataset."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_counts_text(text, kind)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def format_counts(dataset, kind: str) -> str:
    """Serialize a typed dataset back into its CSV schema (inverse of parse)."""
    if kind not in _COLUMNS:
        raise ValueError(f"unknown table kind {kind!r}")
    out = io.StringIO()
    out.write(f"# integration_s: {_fmt(dataset.integration_s)}\n")
    out.write(f"# window_s: {_fmt(dataset.window_s)}\n")
    if kind == "freedman":
        out.write(f"# n0c_cps: {_fmt(dataset.n0c)}\n")
    out.write(",".join(_COLUMNS[kind]) + "\n")

    if kind == "visibility":
        for r in dataset.rows:
            out.write(",".join(_fmt(v) for v in (r.theta_a, r.theta_b, r.rate, r.d_rate)) + "\n")
    elif kind == "chsh":
        for r in dataset.rows:
            out.write(
                ",".join(
                    _fmt(v)
                    for v in (r.theta_a, r.theta_b, r.singles_a, r.singles_b, r.rate, r.d_rate)
                )
                + "\n"
            )
    elif kind == "freedman":
        for r in dataset.rows:
            out.write(
                ",".join(
                    _fmt(v)
                    for v in (r.theta_a, r.theta_b, r.phi, r.singles_a, r.singles_b, r.rate)
                )
                + "\n"
            )
    else:  # tomo
        for r in dataset.records:
            cells = [
                str(r.nu),
                r.label,
                _fmt(r.arm_a.h),
                _fmt(r.arm_a.q),
                _fmt(r.arm_b.h),
                _fmt(r.arm_b.q),
                _fmt(r.singles_a),
                _fmt(r.d_singles_a),
                _fmt(r.singles_b),
                _fmt(r.d_singles_b),
                _fmt(r.coincidences),
                _fmt(r.d_coincidences),
            ]
            out.write(",".join(cells) + "\n")
    return out.getvalue()
