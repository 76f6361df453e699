"""
Multilinear time-invariant systems 𝒳̇ = 𝒜*𝒳 + ℬ*𝒰: trajectories and stability
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import fft as sp_fft

from src.core import matfun
from src.core.errors import NonMonotoneGrid, NotSquare, ShapeMismatch
from src.core.spectral import Eigentuple, SpectralForm, eigentuples, from_spectral, slice_spectra
from src.core.tensor import Tensor3, tprod
from src.core.tfunc import texp
from src.data_provider.base import InputSignal
from src.data_provider.signals import ZeroInput
from src.utils.helpers import map_slices

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MltiSystem:
    """Dynamics 𝒜 (n x n x ℓ) and input map ℬ (n x q x ℓ)"""

    a: Tensor3
    b: Tensor3

    def __post_init__(self):
        if self.a.rows != self.a.cols:
            raise NotSquare(f"dynamics tensor not square: {self.a.shape}")
        if self.a.rows != self.b.rows or self.a.tubes != self.b.tubes:
            raise ShapeMismatch(f"input map {self.b.shape} does not fit dynamics {self.a.shape}")

    @property
    def states(self) -> int:
        return self.a.rows

    @property
    def inputs(self) -> int:
        return self.b.cols

    @property
    def tubes(self) -> int:
        return self.a.tubes

    def check_state(self, x: Tensor3, what: str = "state") -> None:
        if x.rows != self.states or x.tubes != self.tubes:
            raise ShapeMismatch(
                f"{what} {x.shape} incompatible with {self.states} x s x {self.tubes}"
            )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """State snapshots 𝒳(t_k) on a strictly increasing time grid"""

    times: np.ndarray
    states: List[Tensor3]
    inputs: Optional[List[Optional[Tensor3]]] = None
    label: str = "trajectory"

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ShapeMismatch(f"{len(self.times)} times for {len(self.states)} states")
        if len({s.shape for s in self.states}) > 1:
            raise ShapeMismatch("trajectory snapshots differ in shape")

    @property
    def state_shape(self):
        return self.states[0].shape

    def as_matrix(self) -> np.ndarray:
        """One row per grid point, entries in row-major (r, c, k) order"""
        return np.stack([np.real_if_close(s.array).reshape(-1) for s in self.states])

    def column_labels(self) -> List[str]:
        rows, cols, tubes = self.state_shape
        return [
            f"x_{r + 1}_{c + 1}_{k + 1}"
            for r in range(rows)
            for c in range(cols)
            for k in range(tubes)
        ]

    def norms(self) -> np.ndarray:
        """Frobenius norm of each snapshot"""
        return np.array([s.norm() for s in self.states])


@dataclass(frozen=True, eq=False)
class StabilityReport:
    stable: bool
    per_slice_spectra: np.ndarray
    max_real_part: float
    decay_rate: float
    eigentuples: List[Eigentuple] = field(default_factory=list)


def zero_input_solution(sys: MltiSystem, x0: Tensor3, t: float) -> Tensor3:
    """𝒳(t) = e^{𝒜t} * 𝒳(0)"""
    sys.check_state(x0, "initial state")
    if t == 0:
        return x0
    return tprod(texp(sys.a, t), x0)


def _check_grid(grid: Sequence[float]) -> np.ndarray:
    times = np.asarray(grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise NonMonotoneGrid("time grid must be a non-empty 1-d sequence")
    if times[0] != 0.0:
        raise NonMonotoneGrid(f"time grid must start at 0, starts at {times[0]}")
    if np.any(np.diff(times) <= 0):
        raise NonMonotoneGrid("time grid must be strictly increasing")
    return times


def _zoh_factors(item):
    d_i, b_i, h = item
    n, q = b_i.shape
    augmented = np.zeros((n + q, n + q), dtype=complex)
    augmented[:n, :n] = d_i * h
    augmented[:n, n:] = b_i * h
    block = matfun.expm(augmented)
    return block[:n, :n], block[:n, n:]


def simulate(
    sys: MltiSystem,
    x0: Tensor3,
    u: Optional[InputSignal] = None,
    grid: Sequence[float] = (0.0,),
) -> Trajectory:
    """Trajectory of 𝒳̇ = 𝒜*𝒳 + ℬ*𝒰 with 𝒰 held constant between grid points

    The zero-input part is evaluated exactly at every grid point. The
    zero-state part advances per DFT slice with the exact zero-order-hold
    update from the exponential of the augmented block [[D_i, B̂_i], [0, 0]]·h.

    Raises:
        ShapeMismatch: x0 or an input sample does not fit the system
        NonMonotoneGrid: grid does not start at 0 or is not strictly increasing
    """
    sys.check_state(x0, "initial state")
    times = _check_grid(grid)
    u = u or ZeroInput()
    n, q, ell, s = sys.states, sys.inputs, sys.tubes, x0.cols

    a_hat = sp_fft.fft(sys.a.slices, axis=0)
    b_hat = sp_fft.fft(sys.b.slices, axis=0)
    forced_hat = np.zeros((ell, n, s), dtype=complex)
    forced_real = sys.a.is_real and sys.b.is_real
    factor_cache: Dict[float, list] = {}

    states: List[Tensor3] = []
    inputs: List[Optional[Tensor3]] = []
    for k, t in enumerate(times):
        free = zero_input_solution(sys, x0, t)
        forced = from_spectral(SpectralForm(forced_hat), real=forced_real or None)
        state = free + forced
        states.append(state)

        u_k = u.sample(k, float(t), state)
        if u_k is not None and (u_k.rows != q or u_k.cols != s or u_k.tubes != ell):
            raise ShapeMismatch(f"input {u_k.shape} at step {k} should be {q} x {s} x {ell}")
        inputs.append(u_k)
        forced_real = forced_real and (u_k is None or u_k.is_real)

        if k + 1 == len(times):
            break
        h = float(times[k + 1] - t)
        if h not in factor_cache:
            factor_cache[h] = map_slices(
                _zoh_factors, [(a_hat[i], b_hat[i], h) for i in range(ell)]
            )
        factors = factor_cache[h]
        phi = np.stack([f[0] for f in factors])
        gamma = np.stack([f[1] for f in factors])
        forced_hat = phi @ forced_hat
        if u_k is not None:
            forced_hat = forced_hat + gamma @ sp_fft.fft(u_k.slices, axis=0)

    logger.debug("simulated %d grid points with input %s", len(times), u.name)
    return Trajectory(times=times, states=states, inputs=inputs)


def stability(sys: MltiSystem) -> StabilityReport:
    """Exponential stability from the eigenvalues of every D_i"""
    table = slice_spectra(sys.a)
    max_real = float(np.max(table.real))
    report = StabilityReport(
        stable=max_real < 0,
        per_slice_spectra=table,
        max_real_part=max_real,
        decay_rate=-max_real,
        eigentuples=eigentuples(table),
    )
    logger.info(
        "stability: %s (max real part %.6g)", "stable" if report.stable else "unstable", max_real
    )
    return report
