import dataclasses
import enum
import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Union

import numpy as np
import pandas as pd

from Levinson.logger import get_logger
from Levinson.utils.helpers import atomic_write

FLOAT_FORMAT = "%.12e"


def _plain(value):
    """Recursively map reports onto JSON types."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _plain(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    return value


class ReportSynthesizer:
    """Turns run results into JSON reports, CSV curves and a manifest, byte-stable across reruns"""

    def __init__(self):
        self.logger = get_logger(__name__)

    def synthesize(self, results: Union[Dict, List, object], format: str = "json") -> str:
        """
        Render results as text.

        Args:
            results: A report dataclass, a mapping, or (for csv) a mapping of equal-length columns.
            format: "json" or "csv".

        Returns:
            str: File contents.
        """
        try:
            if format.lower() == "json":
                return json.dumps(_plain(results), indent=2, sort_keys=True, allow_nan=False) + "\n"
            elif format.lower() == "csv":
                frame = pd.DataFrame(results)
                return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
            else:
                raise ValueError(f"Unsupported format: {format}")
        except Exception as e:
            self.logger.error(f"Error synthesizing report: {str(e)}")
            raise

    def save(self, content: str, output_file: Path) -> Path:
        """Write content atomically."""
        try:
            atomic_write(str(output_file), content)
            self.logger.info(f"Saved {output_file}")
            return Path(output_file)
        except OSError as e:
            self.logger.error(f"Error saving {output_file}: {str(e)}")
            raise

    def manifest(self, files: List[Path], metadata: Dict) -> Dict:
        """Names and SHA-256 digests of the written files plus run metadata."""
        entries = []
        for path in sorted(files, key=lambda p: Path(p).name):
            digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
            entries.append({"file": Path(path).name, "sha256": digest})
        return {"files": entries, "metadata": _plain(metadata)}
