"""
System file: the JSON document the CLI reads (schema version 1)

{
  "schema": 1,
  "a": {"shape": [n, n, l], "slices": [[[...], ...], ...]},
  "b": {"shape": [n, q, l], "slices": ...},
  "x0": {...}, "k": {...},                      optional
  "design": {"desired": [[[re, im], ...], ...], "bMode": "...", "assembly": "..."},
  "simulate": {"tFinal": 5.0, "step": 0.01, "input": "zero" | {"kind": ..., "values": ...}}
}
"""

import json
import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.core.control import BMode
from src.core.errors import ParseError
from src.core.mlti import MltiSystem
from src.core.spectral import Assembly
from src.core.tensor import Tensor3
from src.data_provider.base import InputSignal
from src.data_provider.signals import ConstantInput, SampledInput, ZeroInput
from src.utils.helpers import pair_to_complex

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class _Model(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


class TensorSpec(_Model):
    """Tensor as its shape and row-major frontal slices"""

    shape: Tuple[int, int, int]
    slices: List[List[List[float]]]

    @model_validator(mode="after")
    def _check_slices(self) -> "TensorSpec":
        rows, cols, tubes = self.shape
        if min(self.shape) < 1:
            raise ValueError(f"every mode must be positive, got {list(self.shape)}")
        if len(self.slices) != tubes:
            raise ValueError(f"{len(self.slices)} frontal slices for {tubes} tubes")
        for j, mat in enumerate(self.slices):
            if len(mat) != rows or any(len(row) != cols for row in mat):
                raise ValueError(f"frontal slice {j + 1} is not {rows} x {cols}")
        if not np.all(np.isfinite(np.asarray(self.slices, dtype=float))):
            raise ValueError("entries must be finite")
        return self

    def to_tensor(self) -> Tensor3:
        return Tensor3.from_slices(self.slices)

    @classmethod
    def from_tensor(cls, t: Tensor3) -> "TensorSpec":
        """System files hold real tensors only; a negligible imaginary part is dropped"""
        return cls(shape=t.shape, slices=t.as_real().slices.tolist())


class DesignBlock(_Model):
    desired: List[List[Tuple[float, float]]]
    b_mode: BMode = Field(default=BMode.SPECTRAL, alias="bMode")
    assembly: Assembly = Assembly.NORMALIZED_IDFT

    def desired_spectra(self) -> List[List[complex]]:
        return [[pair_to_complex(pair) for pair in row] for row in self.desired]


class InputSpec(_Model):
    kind: Literal["zero", "constant", "samples"]
    values: Optional[Union[TensorSpec, List[TensorSpec]]] = None

    @model_validator(mode="after")
    def _check_values(self) -> "InputSpec":
        if self.kind == "constant" and not isinstance(self.values, TensorSpec):
            raise ValueError("constant input needs one tensor in 'values'")
        if self.kind == "samples" and not isinstance(self.values, list):
            raise ValueError("sampled input needs a list of tensors in 'values'")
        return self


class SimulateBlock(_Model):
    t_final: float = Field(alias="tFinal", gt=0)
    step: float = Field(gt=0)
    input: Union[Literal["zero"], InputSpec] = "zero"

    def grid(self) -> np.ndarray:
        """0, step, 2·step, … with the last point clipped to tFinal"""
        count = int(np.ceil(self.t_final / self.step - 1e-9))
        return np.minimum(self.step * np.arange(count + 1), self.t_final)

    def signal(self) -> InputSignal:
        spec = self.input
        if spec == "zero" or spec.kind == "zero":
            return ZeroInput()
        if spec.kind == "constant":
            return ConstantInput(spec.values.to_tensor())
        return SampledInput([v.to_tensor() for v in spec.values])


class SystemFile(_Model):
    schema_version: Literal[1] = Field(default=SCHEMA_VERSION, alias="schema")
    a: TensorSpec
    b: TensorSpec
    x0: Optional[TensorSpec] = None
    k: Optional[TensorSpec] = None
    design: Optional[DesignBlock] = None
    simulate: Optional[SimulateBlock] = None

    def system(self) -> MltiSystem:
        return MltiSystem(a=self.a.to_tensor(), b=self.b.to_tensor())

    def initial_state(self) -> Optional[Tensor3]:
        return self.x0.to_tensor() if self.x0 else None

    def gain(self) -> Optional[Tensor3]:
        return self.k.to_tensor() if self.k else None

    @classmethod
    def from_system(cls, sys: MltiSystem, **tensors: Optional[Tensor3]) -> "SystemFile":
        """Document for ``sys``; keyword tensors fill ``x0`` and ``k``"""
        extra = {
            name: TensorSpec.from_tensor(t) for name, t in tensors.items() if t is not None
        }
        return cls(a=TensorSpec.from_tensor(sys.a), b=TensorSpec.from_tensor(sys.b), **extra)


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc) or "document"


def check_consistency(doc: SystemFile) -> None:
    """Cross-field shape checks that a single field validator cannot see

    Raises:
        ParseError: naming the first inconsistent field
    """
    n, cols, ell = doc.a.shape
    if n != cols:
        raise ParseError(f"dynamics tensor not square: {list(doc.a.shape)}", field="a.shape")
    if doc.b.shape[0] != n or doc.b.shape[2] != ell:
        raise ParseError(
            f"input map {list(doc.b.shape)} does not fit dynamics {list(doc.a.shape)}",
            field="b.shape",
        )
    q = doc.b.shape[1]
    if doc.x0 is not None and (doc.x0.shape[0] != n or doc.x0.shape[2] != ell):
        raise ParseError(f"initial state {list(doc.x0.shape)} does not fit", field="x0.shape")
    if doc.k is not None and tuple(doc.k.shape) != (q, n, ell):
        raise ParseError(f"gain must be {[q, n, ell]}, got {list(doc.k.shape)}", field="k.shape")
    if doc.design is not None:
        desired = doc.design.desired
        if len(desired) != ell:
            raise ParseError(f"{len(desired)} eigenvalue lists for {ell} slices", "design.desired")
        for i, row in enumerate(desired):
            if len(row) != n:
                raise ParseError(
                    f"{len(row)} eigenvalues for {n} states", field=f"design.desired.{i}"
                )
    spec = doc.simulate.input if doc.simulate is not None else "zero"
    if spec != "zero" and spec.values is not None:
        s = doc.x0.shape[1] if doc.x0 is not None else 1
        values = spec.values if isinstance(spec.values, list) else [spec.values]
        for v in values:
            if tuple(v.shape) != (q, s, ell):
                raise ParseError(
                    f"input samples must be {[q, s, ell]}, got {list(v.shape)}",
                    field="simulate.input.values",
                )


def parse_system_file(text: str) -> SystemFile:
    """Validate a system file document

    Raises:
        ParseError: malformed JSON, schema violation or inconsistent shapes
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    try:
        doc = SystemFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        raise ParseError(first["msg"], field=_field_path(first["loc"])) from e
    check_consistency(doc)
    return doc


def load_system_file(path: Union[str, Path]) -> SystemFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from e
    doc = parse_system_file(text)
    logger.info("loaded %s: a %s, b %s", path.name, list(doc.a.shape), list(doc.b.shape))
    return doc


def dump_system_file(doc: SystemFile) -> str:
    return json.dumps(
        doc.model_dump(mode="json", by_alias=True, exclude_none=True), indent=2
    )


def write_system_file(doc: SystemFile, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_system_file(doc) + "\n", encoding="utf-8")
    return path
