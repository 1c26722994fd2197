import io
import logging
import os
from dataclasses import dataclass, field
from typing import Any

import pandas as pd

logger = logging.getLogger("report")

FLOAT_FORMAT = "%.6g"


def frame_to_csv(frame: pd.DataFrame, metadata: dict[str, Any] | None = None) -> str:
    """CSV text with `# key=value` comment lines ahead of the header row."""
    buffer = io.StringIO()
    for key, value in (metadata or {}).items():
        buffer.write(f"# {key}={value}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def write_text(path: str, text: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info(f"wrote {path}")


@dataclass
class ExperimentReport:
    rows: list[dict[str, Any]]
    metadata: dict[str, Any] = field(default_factory=dict)
    columns: list[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        columns = self.columns or (list(self.rows[0]) if self.rows else [])
        return pd.DataFrame(self.rows, columns=columns)

    def to_csv(self) -> str:
        return frame_to_csv(self.to_frame(), self.metadata)

    def write(self, path: str) -> None:
        write_text(path, self.to_csv())

    def row(self, t: float, n: int) -> dict[str, Any]:
        for row in self.rows:
            if row.get("t") == t and row.get("n") == n:
                return row
        raise KeyError(f"no row for t={t}, n={n}")
