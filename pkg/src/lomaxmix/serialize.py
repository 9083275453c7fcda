"""JSON artifacts: histograms, mixture parameters, fit reports, selections."""
from __future__ import annotations

import json
import math
from pathlib import Path

from .corpus import FrequencyHistogram
from .distributions import MixtureParams
from .errors import ParameterError
from .fitting import FitReport, ModelSelection


def _finite_or_str(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _finite_or_str(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite_or_str(v) for v in obj]
    return obj


def dumps(data) -> str:
    return json.dumps(_finite_or_str(data), indent=2, allow_nan=False) + "\n"


def write_json(path, data):
    Path(path).write_text(dumps(data), encoding="utf-8")


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: malformed JSON ({exc})") from None


def load_histogram(path) -> FrequencyHistogram:
    data = read_json(path)
    if not isinstance(data, dict):
        raise ParameterError(f"{path}: histogram JSON must be an object")
    return FrequencyHistogram.from_dict(data)


def load_report(path) -> FitReport:
    """A FitReport file, or the selected report of a ModelSelection file."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise ParameterError(f"{path}: report JSON must be an object")
    if "selected_M" in data:
        return ModelSelection.from_dict(data).selected
    return FitReport.from_dict(data)


def load_params(path) -> MixtureParams:
    """Mixture parameters from a params, report or selection file."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise ParameterError(f"{path}: parameter JSON must be an object")
    if "selected_M" in data or data.get("model") == "mixture":
        report = load_report(path)
        return report.params
    if data.get("model") == "zipf":
        raise ParameterError(f"{path}: a zipf report has no mixture parameters")
    return MixtureParams.from_dict(data)
