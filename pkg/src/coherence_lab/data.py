"""Shared record types for sampled experiment data."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_SCHEMA_TAG = "# schema=curvedata-v1"


@dataclass
class CurveData:
    """One sampled experiment record: abscissa, ordinate, uncertainty.

    Column labels carry units (e.g. ``power_uw``, ``tau_ns``); ``meta``
    records the experiment descriptor, master seed, and shot count so any
    file can be regenerated bit-identically.
    """

    x: np.ndarray
    y: np.ndarray
    y_err: np.ndarray
    x_label: str = "x"
    y_label: str = "y"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.y_err = np.asarray(self.y_err, dtype=float)
        if not (self.x.shape == self.y.shape == self.y_err.shape):
            raise ValueError("x, y, y_err must have identical shapes")
        if np.any(self.y_err < 0):
            raise ValueError("y_err must be nonnegative")

    def __len__(self) -> int:
        return self.x.size

    def to_csv(self, path: str | Path) -> None:
        """Write the record with the curvedata-v1 header.

        Floats are written with shortest round-trip precision, so identical
        data produce byte-identical files.
        """
        lines = [CSV_SCHEMA_TAG]
        if self.meta:
            lines.append("# meta=" + json.dumps(self.meta, sort_keys=True))
        lines.append(f"{self.x_label},{self.y_label},y_err")
        for xi, yi, ei in zip(self.x, self.y, self.y_err):
            lines.append(f"{xi!r},{yi!r},{ei!r}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str | Path) -> "CurveData":
        text = Path(path).read_text().strip().splitlines()
        if not text or text[0].strip() != CSV_SCHEMA_TAG:
            raise ValueError(f"{path}: missing '{CSV_SCHEMA_TAG}' header")
        meta: dict = {}
        i = 1
        while i < len(text) and text[i].startswith("#"):
            if text[i].startswith("# meta="):
                meta = json.loads(text[i][len("# meta="):])
            i += 1
        header = [c.strip() for c in text[i].split(",")]
        if len(header) != 3:
            raise ValueError(f"{path}: expected 3 columns, got {header}")
        rows = [list(map(float, line.split(","))) for line in text[i + 1:] if line.strip()]
        arr = np.asarray(rows, dtype=float)
        if arr.size == 0:
            arr = arr.reshape(0, 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2],
                   x_label=header[0], y_label=header[1], meta=meta)
