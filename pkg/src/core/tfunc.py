"""
Functions of tensors f(𝒜), evaluated slice-wise as matrix functions f(D_i)
"""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import fft as sp_fft

from src.core import matfun
from src.core.errors import EvaluatorFailure, MltiError, NotSquare, ShapeMismatch
from src.core.spectral import SpectralForm, from_spectral, to_spectral
from src.core.tensor import Tensor3, bcirc, enforce_real, fold, matvec_unfold
from src.utils.helpers import map_slices

logger = logging.getLogger(__name__)

MatrixEvaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TensorFunction:
    """A primary matrix function f together with a name for reports

    ``real_coefficients`` marks functions that map real matrices to real
    matrices, so results for real tensors are folded back as real tensors.
    """

    name: str
    evaluator: MatrixEvaluator
    real_coefficients: bool = False

    def __call__(self, m: np.ndarray) -> np.ndarray:
        try:
            result = np.asarray(self.evaluator(m))
        except MltiError:
            raise
        except Exception as e:
            raise EvaluatorFailure(f"{self.name} failed: {e}") from e
        if result.shape != m.shape:
            raise EvaluatorFailure(f"{self.name} returned shape {result.shape} for {m.shape}")
        return result

    @classmethod
    def identity(cls) -> "TensorFunction":
        return cls("identity", lambda m: m, real_coefficients=True)

    @classmethod
    def exponential(cls, t: float = 1.0) -> "TensorFunction":
        """exp(t·)"""
        t = float(t)
        return cls(f"exp({t:g}·)", lambda m: matfun.expm(m * t), real_coefficients=True)

    @classmethod
    def polynomial(cls, coeffs: Sequence[complex]) -> "TensorFunction":
        """p(x) = coeffs[0] x^k + … + coeffs[k] (highest degree first, like numpy.poly)"""
        coeffs = np.asarray(coeffs)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("polynomial needs a non-empty 1-d coefficient list")

        def evaluate(m: np.ndarray) -> np.ndarray:
            eye = np.eye(m.shape[0])
            result = coeffs[0] * eye
            for c in coeffs[1:]:
                result = result @ m + c * eye
            return result

        return cls(
            f"polynomial(degree={coeffs.size - 1})",
            evaluate,
            real_coefficients=bool(np.isrealobj(coeffs)),
        )

    @classmethod
    def from_callable(
        cls, name: str, evaluator: MatrixEvaluator, real_coefficients: bool = False
    ) -> "TensorFunction":
        return cls(name, evaluator, real_coefficients=real_coefficients)


def _require_square(a: Tensor3) -> None:
    if a.rows != a.cols:
        raise NotSquare(f"tensor functions need square frontal slices, got {a.shape}")


def tfun(a: Tensor3, f: TensorFunction) -> Tensor3:
    """f(𝒜) with slice i of the result equal to f(D_i)"""
    _require_square(a)
    spectral = to_spectral(a)
    values = np.stack(map_slices(f, list(spectral.slices)))
    real = a.is_real and f.real_coefficients
    return from_spectral(SpectralForm(values, real_source=real), real=real or None)


def texp(a: Tensor3, t: float) -> Tensor3:
    """Tensor exponential e^{𝒜t}"""
    return tfun(a, TensorFunction.exponential(t))


def tfun_apply(a: Tensor3, f: TensorFunction, b: Tensor3, route: str = "spectral") -> Tensor3:
    """f(𝒜) * ℬ without forming f(𝒜)

    ``route="bcirc"`` evaluates fold(f(bcirc(𝒜)) · MatVec(ℬ)) literally.
    """
    _require_square(a)
    if a.rows != b.rows or a.tubes != b.tubes:
        raise ShapeMismatch(f"cannot apply f({a.shape}) to {b.shape}")
    real = a.is_real and b.is_real and f.real_coefficients
    if route == "bcirc":
        lifted = f(bcirc(a).matrix) @ matvec_unfold(b)
        if real:
            lifted = enforce_real(np.asarray(lifted))
        return fold(lifted, b.rows, b.tubes)
    if route != "spectral":
        raise ValueError(f"unknown route {route!r}")
    a_hat = to_spectral(a)
    b_hat = sp_fft.fft(b.slices, axis=0)
    values = np.stack(map_slices(f, list(a_hat.slices))) @ b_hat
    return from_spectral(SpectralForm(values, real_source=real), real=real or None)
