"""
Third-order tensors and the t-product algebra

Storage is frontal-slice-major: ``Tensor3.slices`` has shape ``(tubes, rows, cols)``
so that ``slices[j]`` is the frontal slice A^(j+1). Entries are addressed
``(row, col, tube)`` through :attr:`Tensor3.array`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sp_fft

from src.config.settings import get_settings
from src.core.errors import ConsistencyError, NotSquare, ShapeMismatch, SingularTensor

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]


def _as_storage(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, copy=True)
    if arr.dtype.kind in "biu":
        arr = arr.astype(np.float64)
    elif arr.dtype.kind == "f":
        arr = arr.astype(np.float64, copy=False)
    elif arr.dtype.kind == "c":
        arr = arr.astype(np.complex128, copy=False)
    else:
        raise ShapeMismatch(f"unsupported scalar type {arr.dtype}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Tensor3:
    """Dense third-order tensor, immutable after construction"""

    slices: np.ndarray

    # numpy scalars defer to our operators instead of broadcasting
    __array_ufunc__ = None

    def __post_init__(self):
        arr = _as_storage(self.slices)
        if arr.ndim != 3:
            raise ShapeMismatch(f"expected a 3-d slice stack, got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise ShapeMismatch(f"every mode must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConsistencyError("tensor has non-finite entries")
        object.__setattr__(self, "slices", arr)

    # ---- construction -------------------------------------------------

    @classmethod
    def from_array(cls, values) -> "Tensor3":
        """Build from a ``(rows, cols, tubes)`` array"""
        arr = np.asarray(values)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if arr.ndim != 3:
            raise ShapeMismatch(f"expected rows x cols x tubes, got ndim={arr.ndim}")
        return cls(np.moveaxis(arr, 2, 0))

    @classmethod
    def from_slices(cls, frontal: Sequence) -> "Tensor3":
        """Build from a sequence of equally sized frontal-slice matrices"""
        mats = [np.atleast_2d(np.asarray(m)) for m in frontal]
        if not mats:
            raise ShapeMismatch("at least one frontal slice is required")
        if len({m.shape for m in mats}) != 1:
            raise ShapeMismatch("frontal slices differ in shape")
        return cls(np.stack(mats))

    @classmethod
    def zeros(cls, rows: int, cols: int, tubes: int, dtype=np.float64) -> "Tensor3":
        return cls(np.zeros((tubes, rows, cols), dtype=dtype))

    # ---- shape ---------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.slices.shape[1]

    @property
    def cols(self) -> int:
        return self.slices.shape[2]

    @property
    def tubes(self) -> int:
        return self.slices.shape[0]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.rows, self.cols, self.tubes)

    @property
    def is_real(self) -> bool:
        return self.slices.dtype.kind == "f"

    @property
    def array(self) -> np.ndarray:
        """Read-only ``(rows, cols, tubes)`` view"""
        return np.moveaxis(self.slices, 0, 2)

    # ---- slicing -------------------------------------------------------

    def frontal_slice(self, j: int) -> np.ndarray:
        """Frontal slice A^(j+1) (0-based ``j``)"""
        return self.slices[j]

    def lateral_slice(self, j: int) -> "Tensor3":
        """Lateral slice 𝒜_{j+1} as a rows x 1 x tubes tensor (0-based ``j``)"""
        return Tensor3(self.slices[:, :, j : j + 1])

    def tube(self, i: int, k: int) -> "TubalScalar":
        """Tube a_{(i+1)(k+1)} (0-based indices)"""
        return TubalScalar(self.slices[:, i, k])

    # ---- arithmetic ----------------------------------------------------

    def _check_same_shape(self, other: "Tensor3") -> None:
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other: "Tensor3") -> "Tensor3":
        self._check_same_shape(other)
        return Tensor3(self.slices + other.slices)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        self._check_same_shape(other)
        return Tensor3(self.slices - other.slices)

    def __neg__(self) -> "Tensor3":
        return Tensor3(-self.slices)

    def __mul__(self, scalar: Number) -> "Tensor3":
        if not np.isscalar(scalar):
            raise TypeError("use @ (t-product) to multiply two tensors")
        return Tensor3(self.slices * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "Tensor3") -> "Tensor3":
        return tprod(self, other)

    @property
    def T(self) -> "Tensor3":
        return ttranspose(self)

    @property
    def H(self) -> "Tensor3":
        return conj_transpose(self)

    def conj(self) -> "Tensor3":
        return Tensor3(np.conj(self.slices))

    def norm(self) -> float:
        """Frobenius norm over all entries"""
        return float(np.linalg.norm(self.slices.ravel()))

    def as_real(self, tol: Optional[float] = None) -> "Tensor3":
        """Drop a negligible imaginary part, see :func:`enforce_real`"""
        if self.is_real:
            return self
        return Tensor3(enforce_real(self.slices, tol))

    def __repr__(self) -> str:
        kind = "real" if self.is_real else "complex"
        return f"Tensor3(shape={self.shape}, {kind})"


@dataclass(frozen=True, eq=False)
class TubalScalar:
    """1 x 1 x n tube, an element of the circular-convolution ring"""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_storage(np.ravel(self.data))
        if arr.size < 1:
            raise ShapeMismatch("tubal scalar needs at least one entry")
        object.__setattr__(self, "data", arr)

    @property
    def tubes(self) -> int:
        return self.data.size

    def to_tensor(self) -> Tensor3:
        return Tensor3(self.data.reshape(-1, 1, 1))

    @classmethod
    def from_tensor(cls, t: Tensor3) -> "TubalScalar":
        if t.rows != 1 or t.cols != 1:
            raise ShapeMismatch(f"tubal scalar must be 1 x 1 x n, got {t.shape}")
        return cls(t.slices[:, 0, 0])

    @classmethod
    def unit(cls, tubes: int) -> "TubalScalar":
        """Multiplicative identity e₁"""
        e1 = np.zeros(tubes)
        e1[0] = 1.0
        return cls(e1)

    def __repr__(self) -> str:
        return f"TubalScalar({np.array2string(self.data, precision=6)})"


@dataclass(frozen=True, eq=False)
class BlockCirculant:
    """Block circulant expansion of a tensor, an (ℓn) x (mn) dense matrix"""

    block_rows: int
    block_cols: int
    tubes: int
    matrix: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        r, c = self.block_rows, self.block_cols
        return self.matrix[i * r : (i + 1) * r, j * c : (j + 1) * c]


def enforce_real(values: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """Truncate an imaginary residue below ``tol``·‖values‖

    Raises:
        ConsistencyError: residue too large for a result that must be real
    """
    if values.dtype.kind != "c":
        return values
    tol = get_settings().real_residue_tol if tol is None else tol
    residue = float(np.linalg.norm(values.imag.ravel()))
    scale = float(np.linalg.norm(values.ravel()))
    if residue > tol * scale:
        raise ConsistencyError(
            f"imaginary residue {residue:.3e} exceeds {tol:.1e} x norm {scale:.3e}"
        )
    if residue > 0.1 * tol * scale:
        logger.warning("Truncating imaginary residue %.3e (norm %.3e)", residue, scale)
    return np.ascontiguousarray(values.real)


def _circulant_index(n: int) -> np.ndarray:
    return (np.arange(n)[:, None] - np.arange(n)[None, :]) % n


def bcirc(t: Tensor3) -> BlockCirculant:
    """Block circulant matrix; block (i, j) is frontal slice ((i - j) mod n) + 1"""
    n, r, c = t.tubes, t.rows, t.cols
    blocks = t.slices[_circulant_index(n)]  # (n, n, r, c)
    matrix = blocks.transpose(0, 2, 1, 3).reshape(n * r, n * c)
    return BlockCirculant(block_rows=r, block_cols=c, tubes=n, matrix=matrix)


def matvec_unfold(t: Tensor3) -> np.ndarray:
    """Stack the frontal slices into a (rows·tubes) x cols block column"""
    return t.slices.reshape(t.tubes * t.rows, t.cols)


def fold(m: np.ndarray, rows: int, tubes: int) -> Tensor3:
    """Inverse of :func:`matvec_unfold`"""
    m = np.atleast_2d(np.asarray(m))
    if m.ndim != 2 or m.shape[0] != rows * tubes:
        raise ShapeMismatch(f"cannot fold {m.shape} into rows={rows}, tubes={tubes}")
    return Tensor3(m.reshape(tubes, rows, m.shape[1]))


def tprod(a: Tensor3, b: Tensor3) -> Tensor3:
    """t-product a * b = fold(bcirc(a) · MatVec(b))"""
    if a.cols != b.rows:
        raise ShapeMismatch(f"inner dimensions differ: {a.shape} * {b.shape}")
    if a.tubes != b.tubes:
        raise ShapeMismatch(f"tube lengths differ: {a.tubes} vs {b.tubes}")
    n = a.tubes
    if n < get_settings().tprod_fft_crossover:
        # direct circular convolution of frontal slices
        shifted = b.slices[_circulant_index(n)]  # shifted[j, k] = B^((j-k) mod n)
        return Tensor3(np.einsum("kip,jkpm->jim", a.slices, shifted))
    a_hat = sp_fft.fft(a.slices, axis=0)
    b_hat = sp_fft.fft(b.slices, axis=0)
    product = sp_fft.ifft(a_hat @ b_hat, axis=0)
    if a.is_real and b.is_real:
        product = enforce_real(product)
    return Tensor3(product)


def _reverse_tail_index(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


def ttranspose(t: Tensor3) -> Tensor3:
    """Transpose each frontal slice and reverse the order of slices 2..n"""
    return Tensor3(t.slices[_reverse_tail_index(t.tubes)].transpose(0, 2, 1))


def conj_transpose(t: Tensor3) -> Tensor3:
    """Conjugate counterpart of :func:`ttranspose`"""
    return Tensor3(np.conj(t.slices[_reverse_tail_index(t.tubes)]).transpose(0, 2, 1))


def identity_tensor(m: int, tubes: int) -> Tensor3:
    """First frontal slice the m x m identity, the others zero"""
    if m < 1 or tubes < 1:
        raise ShapeMismatch(f"identity needs m, tubes >= 1, got {m}, {tubes}")
    slices = np.zeros((tubes, m, m))
    slices[0] = np.eye(m)
    return Tensor3(slices)


def tinv(a: Tensor3, rcond: Optional[float] = None) -> Tensor3:
    """Tensor inverse through slice-wise inversion in the DFT domain

    Raises:
        NotSquare: a.rows != a.cols
        SingularTensor: a DFT slice has reciprocal condition below ``rcond``
    """
    if a.rows != a.cols:
        raise NotSquare(f"tensor inverse needs square slices, got {a.shape}")
    rcond = get_settings().singular_rcond if rcond is None else rcond
    a_hat = sp_fft.fft(a.slices, axis=0)
    sigma = np.linalg.svd(a_hat, compute_uv=False)
    for i, s in enumerate(sigma):
        rc = s[-1] / s[0] if s[0] > 0 else 0.0
        logger.debug("tinv slice %d reciprocal condition %.3e", i + 1, rc)
        if rc < rcond:
            raise SingularTensor(i + 1, f"reciprocal condition {rc:.3e} below {rcond:.1e}")
    inverse = sp_fft.ifft(np.linalg.inv(a_hat), axis=0)
    if a.is_real:
        inverse = enforce_real(inverse)
    return Tensor3(inverse)


def tubal_mult(a: TubalScalar, b: TubalScalar) -> TubalScalar:
    """Circular convolution of two tubes"""
    if a.tubes != b.tubes:
        raise ShapeMismatch(f"tube lengths differ: {a.tubes} vs {b.tubes}")
    return TubalScalar.from_tensor(tprod(a.to_tensor(), b.to_tensor()))


def hstack_lateral(tensors: Iterable[Tensor3]) -> Tensor3:
    """Concatenate tensors along the second mode (lateral slices)"""
    tensors = list(tensors)
    if not tensors:
        raise ShapeMismatch("nothing to concatenate")
    rows, tubes = tensors[0].rows, tensors[0].tubes
    for t in tensors:
        if t.rows != rows or t.tubes != tubes:
            raise ShapeMismatch(f"cannot concatenate {t.shape} with rows={rows}, tubes={tubes}")
    return Tensor3(np.concatenate([t.slices for t in tensors], axis=2))
