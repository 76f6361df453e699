"""
Utility functions for TensorMLTI
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from src.config.settings import get_settings

T = TypeVar("T")
R = TypeVar("R")


def map_slices(
    fn: Callable[[T], R], items: Iterable[T], max_workers: Optional[int] = None
) -> List[R]:
    """Apply ``fn`` to independent per-slice items, results in input order"""
    items = list(items)
    workers = max_workers if max_workers is not None else get_settings().max_workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def format_float(value: float, digits: int = 15) -> str:
    """Fixed-width scientific rendering, e.g. ``-3.41421356237309e+00``"""
    value = float(value)
    if value == 0.0:
        value = 0.0  # drop the sign of -0.0
    return f"{value:.{digits - 1}e}"


def complex_pair(value: complex) -> List[float]:
    """Serialize a complex number as ``[re, im]``"""
    value = complex(value)
    return [value.real, value.imag]


def pair_to_complex(pair: Sequence[float]) -> complex:
    """Inverse of :func:`complex_pair`"""
    if len(pair) != 2:
        raise ValueError(f"expected [re, im], got {list(pair)!r}")
    return complex(float(pair[0]), float(pair[1]))
