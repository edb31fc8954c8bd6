"""
File IO for matrices, pulse sequences and tabular results.

JSON is written with sorted keys and two-space indentation; CSV goes through
pandas with full double precision.
"""

import json
import sys
from typing import Dict, Any, Optional

import numpy as np
import pandas as pd

from lie.matcore import MatC
from utils.errors import MalformedInput

CSV_FLOAT_FORMAT = "%.17g"


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    except OSError as e:
        raise MalformedInput(f"Cannot read {path}: {e.strerror}")


def dump_json(data: Any, path: Optional[str] = None) -> str:
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return text


def read_matrix(path: str) -> np.ndarray:
    """Matrix file in the {"dim", "re", "im"} encoding"""
    data = load_json(path)
    if not isinstance(data, dict):
        raise MalformedInput(f"{path}: expected a JSON object with dim/re/im")
    return MatC.from_dict(data).entries


def write_matrix(M: np.ndarray, path: Optional[str] = None) -> str:
    return dump_json(MatC.of(M).to_dict(), path)


def write_csv(frame: pd.DataFrame, path: Optional[str] = None) -> str:
    text = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT)
    if path:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return text


def parse_coefficients(text: str) -> list:
    """Comma-separated reals, e.g. "1,2,4" """
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise MalformedInput(f"Expected comma-separated numbers, got: {text}")


def parse_tolerance(text: str) -> Dict[str, float]:
    """name=value"""
    name, sep, value = text.partition("=")
    if not sep:
        raise MalformedInput(f"Tolerance override must look like name=value, got: {text}")
    try:
        return {name.strip(): float(value)}
    except ValueError:
        raise MalformedInput(f"Tolerance {name} needs a numeric value, got: {value}")
