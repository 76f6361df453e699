"""
Controllability tests and state feedback by per-slice eigenvalue placement
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Union

import numpy as np

from src.core import matfun
from src.core.errors import (
    ConjugacyViolation,
    ConsistencyError,
    DimensionMismatch,
    ShapeMismatch,
    Uncontrollable,
    Unsupported,
)
from src.core.mlti import MltiSystem
from src.core.spectral import Assembly, SpectralForm, from_spectral, slice_spectra, to_spectral
from src.core.tensor import Tensor3, bcirc, hstack_lateral, matvec_unfold, tprod
from src.utils.helpers import map_slices

logger = logging.getLogger(__name__)


class ControllabilityMode(str, Enum):
    # [ℬ_v, 𝒜_c ℬ_v, …, 𝒜_c^{n-1} ℬ_v] with ℬ_v = MatVec(ℬ)
    PAPER_LITERAL = "paper-literal"
    # [bcirc(ℬ), 𝒜_c bcirc(ℬ), …, 𝒜_c^{ℓn-1} bcirc(ℬ)]
    LIFTED_KALMAN = "lifted-kalman"
    # Kalman rank of (D_i, B̂_i) for every DFT slice
    PER_SLICE = "per-slice"


class BMode(str, Enum):
    SPECTRAL = "spectral"
    # B_i = first block of MatVec(ℬ) for every slice; reproduces the published gains
    FIRST_BLOCK = "first-block"


@dataclass(frozen=True)
class SliceControllability:
    slice_number: int
    rank: int
    controllable: bool


@dataclass(frozen=True)
class ControllabilityReport:
    mode: ControllabilityMode
    rank: int
    required: int
    controllable: bool
    per_slice: Optional[List[SliceControllability]] = None


@dataclass(frozen=True, eq=False)
class FeedbackGain:
    """Gain tensor 𝒦 (q x n x ℓ) with the per-slice design record"""

    k: Tensor3
    per_slice_gains: List[np.ndarray]
    desired_spectra: np.ndarray
    b_mode: BMode = BMode.SPECTRAL
    assembly: Assembly = Assembly.NORMALIZED_IDFT

    @property
    def paper_compat(self) -> bool:
        return self.b_mode is BMode.FIRST_BLOCK or self.assembly is Assembly.PAPER_COMPAT


def ctrb_tensor(sys: MltiSystem) -> Tensor3:
    """Controllability tensor [ℬ, 𝒜*ℬ, …, 𝒜^{n-1}*ℬ], n x (nq) x ℓ"""
    blocks = [sys.b]
    for _ in range(sys.states - 1):
        blocks.append(tprod(sys.a, blocks[-1]))
    return hstack_lateral(blocks)


def _slice_rank(item):
    d_i, b_i, depth, tol = item
    return matfun.rank(matfun.kalman_matrix(d_i, b_i, depth=depth), tol)


def ctrb_check(
    sys: MltiSystem,
    mode: Union[ControllabilityMode, str] = ControllabilityMode.PER_SLICE,
    tol: Optional[float] = None,
) -> ControllabilityReport:
    """Controllability verdict under one of the three rank criteria"""
    mode = ControllabilityMode(mode)
    n, ell = sys.states, sys.tubes
    required = ell * n

    if mode is ControllabilityMode.PER_SLICE:
        a_hat, b_hat = to_spectral(sys.a), to_spectral(sys.b)
        ranks = map_slices(_slice_rank, [(a_hat[i], b_hat[i], n, tol) for i in range(ell)])
        per_slice = [
            SliceControllability(slice_number=i + 1, rank=r, controllable=r == n)
            for i, r in enumerate(ranks)
        ]
        report = ControllabilityReport(
            mode=mode,
            rank=int(sum(ranks)),
            required=required,
            controllable=all(s.controllable for s in per_slice),
            per_slice=per_slice,
        )
    else:
        a_c = bcirc(sys.a).matrix
        if mode is ControllabilityMode.PAPER_LITERAL:
            krylov = matfun.kalman_matrix(a_c, matvec_unfold(sys.b), depth=n)
        else:
            krylov = matfun.kalman_matrix(a_c, bcirc(sys.b).matrix, depth=required)
        r = matfun.rank(krylov, tol)
        report = ControllabilityReport(
            mode=mode, rank=r, required=required, controllable=r == required
        )

    logger.info(
        "controllability [%s]: rank %d of %d -> %s",
        mode.value,
        report.rank,
        report.required,
        "controllable" if report.controllable else "not controllable",
    )
    return report


def _check_conjugacy(desired: np.ndarray, tol: float = 1e-9) -> None:
    ell = desired.shape[0]
    for i in range(ell):
        mirror = (-i) % ell
        scale = max(1.0, float(np.max(np.abs(desired[i]))))
        if matfun.match_spectra(desired[mirror], np.conj(desired[i])) > tol * scale:
            if mirror == i:
                detail = "requested eigenvalues are not closed under conjugation"
            else:
                detail = f"requested eigenvalues are not the conjugates of slice {mirror + 1}"
            raise ConjugacyViolation(i + 1, f"{detail}; the gain tensor would be complex")


def design_feedback(
    sys: MltiSystem,
    desired: Sequence[Sequence[complex]],
    b_mode: Union[BMode, str] = BMode.SPECTRAL,
    assembly: Union[Assembly, str] = Assembly.NORMALIZED_IDFT,
    tol: Optional[float] = None,
) -> FeedbackGain:
    """Place the eigenvalues of every D_i and fold the slice gains into 𝒦

    Args:
        sys: open-loop system, single input (q = 1)
        desired: ℓ lists of n requested eigenvalues, list i for D_{i+1}
        b_mode: spectral uses B̂_i; first-block uses the first block of MatVec(ℬ)
        assembly: normalized-idft (inverse DFT) or paper-compat (forward DFT)
        tol: rank tolerance of the controllability test

    Raises:
        Unsupported: more than one input
        DimensionMismatch: wrong number of slices or eigenvalues
        Uncontrollable: a slice pair (D_i, B_i) is not controllable
        ConjugacyViolation: the requested spectra would give a complex gain
    """
    b_mode, assembly = BMode(b_mode), Assembly(assembly)
    n, q, ell = sys.states, sys.inputs, sys.tubes
    if q != 1:
        raise Unsupported(f"eigenvalue placement is single-input only, system has q={q}")
    if len(desired) != ell:
        raise DimensionMismatch(f"{len(desired)} desired spectra for {ell} slices")
    for i, row in enumerate(desired):
        if len(row) != n:
            raise DimensionMismatch(f"slice {i + 1}: {len(row)} eigenvalues for {n} states")
    desired = np.array([[complex(v) for v in row] for row in desired])

    real = sys.a.is_real and sys.b.is_real
    if real:
        _check_conjugacy(desired)
    if b_mode is BMode.FIRST_BLOCK:
        logger.warning("first-block input map: closed-loop spectra will not match the request")

    a_hat = to_spectral(sys.a)
    b_hat = to_spectral(sys.b)
    computed = range(ell // 2 + 1) if real else range(ell)
    gains = {}
    for i in computed:
        a_i = a_hat[i]
        b_i = b_hat[i] if b_mode is BMode.SPECTRAL else sys.b.frontal_slice(0)
        if real and (-i) % ell == i:
            # self-mirrored slices of a real system are real
            a_i, b_i = a_i.real, b_i.real
        try:
            gains[i] = matfun.place_single_input(a_i, b_i, desired[i], tol)
        except Uncontrollable as e:
            raise Uncontrollable(i + 1, e.detail) from e
        logger.debug("slice %d gain %s", i + 1, gains[i])
    if real:
        for i in range(ell // 2 + 1, ell):
            gains[i] = np.conj(gains[(-i) % ell])

    per_slice = [gains[i] for i in range(ell)]
    form = SpectralForm(np.stack(per_slice).astype(complex))
    try:
        k = from_spectral(form, assembly=assembly, real=True if real else None)
    except ConsistencyError as e:
        raise ConjugacyViolation(None, f"gain tensor is not real: {e}") from e

    return FeedbackGain(
        k=k,
        per_slice_gains=per_slice,
        desired_spectra=desired,
        b_mode=b_mode,
        assembly=assembly,
    )


def closed_loop(sys: MltiSystem, g: Union[FeedbackGain, Tensor3]) -> MltiSystem:
    """Closed loop 𝒜 − ℬ*𝒦 under 𝒰 = −𝒦*𝒳, same ℬ"""
    k = g.k if isinstance(g, FeedbackGain) else g
    if k.rows != sys.inputs or k.cols != sys.states or k.tubes != sys.tubes:
        raise ShapeMismatch(
            f"gain {k.shape} should be {sys.inputs} x {sys.states} x {sys.tubes}"
        )
    return MltiSystem(a=sys.a - tprod(sys.b, k), b=sys.b)


def closed_loop_spectra(sys: MltiSystem, g: Union[FeedbackGain, Tensor3]) -> np.ndarray:
    """Ordered eigenvalues of every closed-loop DFT slice, (ℓ, n)"""
    return slice_spectra(closed_loop(sys, g).a)
