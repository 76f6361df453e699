"""
DFT-domain view of tensors: block diagonalization of bcirc, t-eig, eigentuples

Convention: the forward transform along the tubes is unnormalized with
ω = exp(-2πi/n); the inverse carries the 1/n factor. Slice ``i`` (0-based)
of a :class:`SpectralForm` is D_{i+1}.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Union

import numpy as np
from scipy import fft as sp_fft

from src.config.settings import get_settings
from src.core import matfun
from src.core.errors import DefectiveSlice, NotSquare
from src.core.tensor import Tensor3, TubalScalar, enforce_real
from src.utils.helpers import map_slices

logger = logging.getLogger(__name__)


class Assembly(str, Enum):
    """How per-slice factors are folded back into a tensor"""

    NORMALIZED_IDFT = "normalized-idft"
    # unnormalized forward DFT of the stacked factors, reproduces the published gains
    PAPER_COMPAT = "paper-compat"


@dataclass(frozen=True, eq=False)
class SpectralForm:
    """Ordered DFT-domain slices D_1..D_n, stored as a ``(tubes, rows, cols)`` stack"""

    slices: np.ndarray
    real_source: bool = False

    @property
    def tubes(self) -> int:
        return self.slices.shape[0]

    def __getitem__(self, i: int) -> np.ndarray:
        return self.slices[i]

    def __len__(self) -> int:
        return self.tubes

    def is_conjugate_symmetric(self, tol: Optional[float] = None) -> bool:
        """slices[n-i] == conj(slices[i]) for every i (0-based, indices mod n)"""
        tol = get_settings().real_residue_tol if tol is None else tol
        mirrored = np.conj(self.slices[(-np.arange(self.tubes)) % self.tubes])
        scale = float(np.linalg.norm(self.slices.ravel()))
        return float(np.linalg.norm((self.slices - mirrored).ravel())) <= tol * scale


def to_spectral(t: Tensor3) -> SpectralForm:
    """Forward DFT of the frontal slices along the tubes"""
    return SpectralForm(slices=sp_fft.fft(t.slices, axis=0), real_source=t.is_real)


def from_spectral(
    s: SpectralForm,
    assembly: Union[Assembly, str] = Assembly.NORMALIZED_IDFT,
    real: Optional[bool] = None,
) -> Tensor3:
    """Fold DFT-domain slices back into a tensor

    ``real=None`` enforces a real result when the form came from a real tensor
    or is conjugate symmetric; ``True`` always enforces it, ``False`` never.

    Raises:
        ConsistencyError: imaginary residue too large for an enforced real result
    """
    assembly = Assembly(assembly)
    if assembly is Assembly.NORMALIZED_IDFT:
        values = sp_fft.ifft(s.slices, axis=0)
    else:
        logger.warning("Assembling with the paper-compat (unnormalized forward DFT) convention")
        values = sp_fft.fft(s.slices, axis=0)
    if real is None:
        real = s.real_source or s.is_conjugate_symmetric()
    if real:
        values = enforce_real(values)
    return Tensor3(values)


@dataclass(frozen=True, eq=False)
class TEig:
    """t-eigendecomposition 𝒜 = 𝒫 * 𝒟 * 𝒫⁻¹ with f-diagonal 𝒟

    ``eigenvalues[i, j]`` is λ_{j+1}^{i+1}, the j-th ordered eigenvalue of D_{i+1}.
    """

    p: Tensor3
    d: Tensor3
    pinv: Tensor3
    eigenvalues: np.ndarray

    def reconstruct(self) -> Tensor3:
        return self.p @ (self.d @ self.pinv)


@dataclass(frozen=True, eq=False)
class Eigentuple:
    """Eigentuple d_k: a tube and its DFT, the k-th eigenvalues across slices"""

    tube: TubalScalar
    spectrum: np.ndarray

    @classmethod
    def from_spectrum(cls, spectrum) -> "Eigentuple":
        spectrum = np.asarray(spectrum, dtype=complex).ravel()
        form = SpectralForm(slices=spectrum.reshape(-1, 1, 1))
        tube = TubalScalar.from_tensor(from_spectral(form))
        return cls(tube=tube, spectrum=spectrum)


def _decompose_slice(item):
    index, d_i, rcond = item
    values, vectors = matfun.eig(d_i)
    rc = matfun.reciprocal_condition(vectors)
    logger.debug("slice %d eigenvector reciprocal condition %.3e", index + 1, rc)
    if rc < rcond:
        raise DefectiveSlice(
            index + 1, f"eigenvector matrix reciprocal condition {rc:.3e} below {rcond:.1e}"
        )
    return values, vectors, np.linalg.inv(vectors)


def teig(a: Tensor3, rcond: Optional[float] = None, conjugate_pairing: bool = False) -> TEig:
    """t-eigendecomposition through per-slice eigendecompositions of D_i

    With ``conjugate_pairing`` (real input only) slice n-i reuses the conjugate
    of slice i's factors, so mirrored eigenvalue columns pair up and 𝒫, 𝒟
    come out real whenever the self-conjugate slices have real spectra.
    Mirrored rows of ``eigenvalues`` then keep the column order of their
    partner row instead of :func:`~src.core.matfun.eigen_order`, so the two
    members of a complex pair swap places there. :func:`slice_spectra` (and the
    eigentuples of a stability report) always use the ordered form.

    Raises:
        NotSquare: a.rows != a.cols
        DefectiveSlice: an eigenvector matrix is numerically singular
    """
    if a.rows != a.cols:
        raise NotSquare(f"t-eig needs square frontal slices, got {a.shape}")
    rcond = get_settings().defective_rcond if rcond is None else rcond
    spectral = to_spectral(a)
    n = a.tubes
    pair = conjugate_pairing and a.is_real
    computed = range(n // 2 + 1) if pair else range(n)
    parts = map_slices(_decompose_slice, [(i, spectral[i], rcond) for i in computed])
    factors = dict(zip(computed, parts))
    if pair:
        for i in range(n // 2 + 1, n):
            values, vectors, inverse = factors[n - i]
            factors[i] = (np.conj(values), np.conj(vectors), np.conj(inverse))

    eigenvalues = np.stack([factors[i][0] for i in range(n)])
    p_hat = np.stack([factors[i][1] for i in range(n)])
    pinv_hat = np.stack([factors[i][2] for i in range(n)])
    d_hat = np.stack([np.diag(row) for row in eigenvalues])
    return TEig(
        p=from_spectral(SpectralForm(p_hat)),
        d=from_spectral(SpectralForm(d_hat)),
        pinv=from_spectral(SpectralForm(pinv_hat)),
        eigenvalues=eigenvalues,
    )


def eigentuples(e: Union[TEig, np.ndarray]) -> List[Eigentuple]:
    """Eigentuples from a t-eig, or directly from a (tubes, rows) eigenvalue table"""
    table = e.eigenvalues if isinstance(e, TEig) else np.asarray(e, dtype=complex)
    return [Eigentuple.from_spectrum(table[:, k]) for k in range(table.shape[1])]


def slice_spectra(a: Tensor3) -> np.ndarray:
    """Ordered eigenvalues of every D_i as a (tubes, rows) table, no eigenvectors"""
    if a.rows != a.cols:
        raise NotSquare(f"spectra need square frontal slices, got {a.shape}")
    spectral = to_spectral(a)
    return np.stack(map_slices(matfun.eigvals, list(spectral.slices)))


def tubal_rank(a: TubalScalar, tol: Optional[float] = None) -> int:
    """Number of Fourier coefficients above ``tol`` times the largest one"""
    tol = get_settings().tubal_rank_tol if tol is None else tol
    magnitudes = np.abs(sp_fft.fft(a.data))
    peak = float(np.max(magnitudes))
    if peak == 0.0:
        return 0
    return int(np.count_nonzero(magnitudes > tol * peak))
