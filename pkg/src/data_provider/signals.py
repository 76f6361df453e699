"""
Concrete input signals for trajectory simulation
"""

from typing import Optional, Sequence

from src.core.errors import ShapeMismatch
from src.core.tensor import Tensor3, tprod
from src.data_provider.base import InputSignal


class ZeroInput(InputSignal):
    @property
    def name(self) -> str:
        return "zero"

    def sample(self, k: int, t: float, state: Tensor3) -> Optional[Tensor3]:
        return None


class ConstantInput(InputSignal):
    def __init__(self, value: Tensor3):
        self.value = value

    @property
    def name(self) -> str:
        return "constant"

    def sample(self, k: int, t: float, state: Tensor3) -> Optional[Tensor3]:
        return self.value


class SampledInput(InputSignal):
    """One pre-sampled input tensor per grid point"""

    def __init__(self, values: Sequence[Tensor3]):
        if not values:
            raise ShapeMismatch("sampled input needs at least one value")
        shapes = {v.shape for v in values}
        if len(shapes) != 1:
            raise ShapeMismatch(f"sampled inputs differ in shape: {sorted(shapes)}")
        self.values = list(values)

    @property
    def name(self) -> str:
        return "samples"

    def sample(self, k: int, t: float, state: Tensor3) -> Optional[Tensor3]:
        if k >= len(self.values):
            raise ShapeMismatch(f"no input sample for grid index {k} ({len(self.values)} given)")
        return self.values[k]


class StateFeedbackInput(InputSignal):
    """𝒰(t_k) = −𝒦 * 𝒳(t_k), held over each step"""

    def __init__(self, gain: Tensor3):
        self.gain = gain

    @property
    def name(self) -> str:
        return "state-feedback"

    def sample(self, k: int, t: float, state: Tensor3) -> Optional[Tensor3]:
        return -tprod(self.gain, state)
