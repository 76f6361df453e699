"""
Run reports: plain dictionaries built from analysis results, rendered as
deterministic JSON (fixed significant digits, lowercase scientific notation)
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from src.config.settings import get_settings
from src.core import matfun
from src.core.control import ControllabilityReport, FeedbackGain
from src.core.mlti import StabilityReport
from src.core.spectral import Eigentuple, TEig
from src.core.tensor import Tensor3
from src.utils.helpers import complex_pair, format_float

logger = logging.getLogger(__name__)

REPORT_VERSION = 1


def number(value) -> Union[float, List[float]]:
    """Real scalars stay scalars, anything with an imaginary part becomes [re, im]"""
    value = complex(value)
    if value.imag == 0.0:
        return value.real
    return complex_pair(value)


def tensor_entry(t: Tensor3) -> Dict[str, Any]:
    if t.is_real:
        slices = t.slices.tolist()
    else:
        slices = [[[complex_pair(v) for v in row] for row in mat] for mat in t.slices]
    return {"shape": list(t.shape), "slices": slices}


def spectra_entry(table: np.ndarray) -> List[List[List[float]]]:
    """Per-slice eigenvalues, always as [re, im] pairs"""
    return [[complex_pair(v) for v in row] for row in np.asarray(table)]


def eigentuple_entry(e: Eigentuple) -> Dict[str, Any]:
    return {
        "tube": [number(v) for v in e.tube.data],
        "spectrum": [complex_pair(v) for v in e.spectrum],
    }


def stability_entry(report: StabilityReport) -> Dict[str, Any]:
    return {
        "stable": report.stable,
        "maxRealPart": report.max_real_part,
        "alpha": report.decay_rate,
        "perSliceSpectra": spectra_entry(report.per_slice_spectra),
        "eigentuples": [eigentuple_entry(e) for e in report.eigentuples],
    }


def controllability_entry(report: ControllabilityReport) -> Dict[str, Any]:
    entry = {
        "mode": report.mode.value,
        "rank": report.rank,
        "required": report.required,
        "controllable": report.controllable,
    }
    if report.per_slice is not None:
        entry["perSlice"] = [
            {"slice": s.slice_number, "rank": s.rank, "controllable": s.controllable}
            for s in report.per_slice
        ]
    return entry


def teig_diagnostics(a: Tensor3, e: TEig) -> Dict[str, Any]:
    """Reconstruction error of 𝒫*𝒟*𝒫⁻¹ and the imaginary residues of the factors"""
    scale = a.norm() or 1.0
    residues = {}
    for name, t in (("p", e.p), ("d", e.d), ("pinv", e.pinv)):
        residues[name] = 0.0 if t.is_real else float(np.linalg.norm(t.slices.imag.ravel()))
    return {
        "reconstructionError": (e.reconstruct() - a).norm() / scale,
        "imaginaryResidues": residues,
    }


def gain_entry(g: FeedbackGain, closed_loop_spectra: np.ndarray) -> Dict[str, Any]:
    """Gain record with the achieved closed-loop spectra and the mismatch to the request"""
    mismatch = [
        matfun.match_spectra(achieved, wanted)
        for achieved, wanted in zip(closed_loop_spectra, g.desired_spectra)
    ]
    return {
        "bMode": g.b_mode.value,
        "assembly": g.assembly.value,
        "perSliceGains": [[number(v) for v in np.ravel(k)] for k in g.per_slice_gains],
        "k": tensor_entry(g.k),
        "desiredSpectra": spectra_entry(g.desired_spectra),
        "closedLoopSpectra": spectra_entry(closed_loop_spectra),
        "spectrumMismatch": mismatch,
    }


def new_report(command: str, source: Optional[Path] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"reportVersion": REPORT_VERSION, "command": command}
    if source is not None:
        doc["source"] = Path(source).name
    return doc


def _render(value: Any, digits: int, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_render(v, digits, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            return "[" + ", ".join(_render(v, digits, indent + 1) for v in value) + "]"
        items = [f"{inner}{_render(v, digits, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number in report: {value}")
        return format_float(value, digits)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot render {type(value).__name__} in a report")


def render_report(doc: Dict[str, Any], digits: Optional[int] = None) -> str:
    """Deterministic JSON text: same document, same bytes"""
    digits = get_settings().report_digits if digits is None else digits
    return _render(doc, digits, 0) + "\n"


def write_report(doc: Dict[str, Any], output_dir: Union[str, Path], stem: str) -> Path:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / f"{stem}.json"
    path.write_text(render_report(doc), encoding="utf-8")
    logger.info("report written to %s", path)
    return path

