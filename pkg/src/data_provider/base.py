"""
Input signal base classes
"""

from abc import ABC, abstractmethod
from typing import Optional

from src.core.tensor import Tensor3


class InputSignal(ABC):
    """Abstract source of the input tensor 𝒰(t_k) at each grid point

    Values are held constant until the next grid point (zero-order hold).
    """

    @property
    @abstractmethod
    def name(self) -> str:
        pass

    @abstractmethod
    def sample(self, k: int, t: float, state: Tensor3) -> Optional[Tensor3]:
        """Input at grid index ``k`` (time ``t``) given the current state

        Returns None for a zero input.
        """
        pass
