"""File ingestion and serialization.

Formats:
  dense points   CSV, one point per row, decimal floats, no header unless
                 the caller skips one.
  fingerprints   one vector per line as '0'/'1' characters (uniform length),
                 or hex lines prefixed "0x" (big-endian nibbles; the hex
                 value is the bit-string read as a binary number, so the
                 vector dimension must be supplied).
  labels         CSV "index,label" with a header row, labels 0..C-1.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from sortclust.data import DenseDataset, FingerprintSet
from sortclust.errors import DataFormatError


def load_dense_csv(path: str | Path, skip_header: bool = False) -> DenseDataset:
    rows: list[list[float]] = []
    d = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if lineno == 1 and skip_header:
                continue
            line = raw.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                values = [float(f) for f in fields]
            except ValueError as exc:
                raise DataFormatError(f"cannot parse float: {exc}", line=lineno) from exc
            if d is None:
                d = len(values)
            elif len(values) != d:
                raise DataFormatError(
                    f"expected {d} columns, found {len(values)}", line=lineno
                )
            rows.append(values)
    if not rows:
        raise DataFormatError(f"no data rows in {path}")
    return DenseDataset(points=np.array(rows, dtype=np.float64))


def _parse_bit_line(line: str, lineno: int) -> np.ndarray:
    try:
        arr = np.frombuffer(line.encode("ascii"), dtype=np.uint8)
    except UnicodeEncodeError as exc:
        raise DataFormatError("non-ASCII character in bit line", line=lineno) from exc
    bits = arr - ord("0")
    if ((bits != 0) & (bits != 1)).any():
        raise DataFormatError("bit line may contain only '0' and '1'", line=lineno)
    return bits.astype(bool)


def _parse_hex_line(line: str, lineno: int, d: int) -> np.ndarray:
    try:
        value = int(line[2:], 16)
    except ValueError as exc:
        raise DataFormatError(f"cannot parse hex line: {exc}", line=lineno) from exc
    if value >= (1 << d):
        raise DataFormatError(f"hex value does not fit in {d} bits", line=lineno)
    n_bytes = (d + 7) // 8
    raw = np.frombuffer(value.to_bytes(n_bytes, "big"), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="big")[-d:]
    return bits.astype(bool)


def load_fingerprints(path: str | Path, dims: int | None = None) -> FingerprintSet:
    """Parse a fingerprint file in either the '0'/'1' or the hex format.

    The format is detected from the first non-empty line; the two may not be
    mixed. Hex files require ``dims`` because leading zero bits are not
    recoverable from the value alone.
    """
    rows: list[np.ndarray] = []
    mode = None
    d = dims
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            is_hex = line.startswith("0x") or line.startswith("0X")
            if mode is None:
                mode = "hex" if is_hex else "bits"
                if mode == "hex" and dims is None:
                    raise DataFormatError(
                        "hex fingerprint format requires the vector dimension",
                        line=lineno,
                    )
            elif (mode == "hex") != is_hex:
                raise DataFormatError("mixed hex and bit-string lines", line=lineno)
            if mode == "hex":
                row = _parse_hex_line(line, lineno, d)
            else:
                row = _parse_bit_line(line, lineno)
                if d is None:
                    d = row.shape[0]
                elif row.shape[0] != d:
                    raise DataFormatError(
                        f"expected {d} bits, found {row.shape[0]}", line=lineno
                    )
            rows.append(row)
    if not rows:
        raise DataFormatError(f"no fingerprints in {path}")
    return FingerprintSet.from_bool_matrix(np.array(rows, dtype=bool))


def save_fingerprints(path: str | Path, fps: FingerprintSet, fmt: str = "bits") -> None:
    rows = fps.to_bool_matrix()
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            bitstring = "".join("1" if b else "0" for b in row)
            if fmt == "bits":
                fh.write(bitstring + "\n")
            elif fmt == "hex":
                fh.write("0x%x\n" % int(bitstring, 2))
            else:
                raise ValueError(f"unknown fingerprint format: {fmt}")


def save_labels(path: str | Path, labels: np.ndarray) -> None:
    labels = np.asarray(labels)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "label"])
        for i, lab in enumerate(labels):
            writer.writerow([i, int(lab)])


def load_labels(path: str | Path) -> np.ndarray:
    pairs: list[tuple[int, int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if lineno == 1 and not row[0].strip().lstrip("-").isdigit():
                continue  # header
            if len(row) != 2:
                raise DataFormatError("expected exactly two columns", line=lineno)
            try:
                pairs.append((int(row[0]), int(row[1])))
            except ValueError as exc:
                raise DataFormatError(f"cannot parse label row: {exc}", line=lineno) from exc
    if not pairs:
        raise DataFormatError(f"no labels in {path}")
    n = len(pairs)
    labels = np.full(n, -1, dtype=np.int64)
    for idx, lab in pairs:
        if not 0 <= idx < n:
            raise DataFormatError(f"label index {idx} outside 0..{n - 1}")
        labels[idx] = lab
    if (labels < 0).any():
        raise DataFormatError("label file has duplicate or missing indices")
    return labels
