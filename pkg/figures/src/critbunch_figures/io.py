"""Reader for critbunch series files (CSV with a hashed config header).

The producer embeds every resolved configuration key as ``# cfg:key = value``
lines plus ``# config_hash``, the SHA-256 over exactly those lines.  The
reader recomputes the hash and refuses files where it does not match, so a
figure can never silently mix hand-edited or stale inputs.  This package only
ever re-plots serialized data; it never recomputes physics.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SeriesError(Exception):
    pass


@dataclass(frozen=True)
class Series:
    path: Path
    cfg: dict
    meta: dict
    columns: dict

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            have = ", ".join(sorted(self.columns))
            raise SeriesError(
                f"{self.path}: missing column {name!r} (file has: {have})"
            ) from None


def read_series(path: str | Path) -> Series:
    path = Path(path)
    cfg, meta = {}, {}
    embedded_hash = None
    header = None
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("# config_hash = "):
            embedded_hash = line.partition(" = ")[2].strip()
        elif line.startswith("# cfg:"):
            key, _, value = line[6:].partition(" = ")
            cfg[key] = value
        elif line.startswith("# meta:"):
            key, _, value = line[7:].partition(" = ")
            meta[key] = value
        elif line.startswith("#") or not line.strip():
            continue
        elif header is None:
            header = [h.strip() for h in line.split(",")]
        else:
            rows.append(line.split(","))

    if embedded_hash is None:
        raise SeriesError(f"{path}: no config_hash header; not a critbunch series file")
    recomputed = hashlib.sha256(
        "\n".join(f"cfg:{k} = {cfg[k]}" for k in sorted(cfg)).encode()
    ).hexdigest()
    if recomputed != embedded_hash:
        raise SeriesError(
            f"{path}: config hash mismatch (file says {embedded_hash[:12]}..., "
            f"header lines give {recomputed[:12]}...)"
        )
    if header is None or not rows:
        raise SeriesError(f"{path}: series holds no data rows")
    data = np.array([[float(x) for x in row] for row in rows])
    columns = {name: data[:, i] for i, name in enumerate(header)}
    return Series(path=path, cfg=cfg, meta=meta, columns=columns)
