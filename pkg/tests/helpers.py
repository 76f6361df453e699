import json

import numpy as np

from src.core.spectral import slice_spectra
from src.core.tensor import Tensor3

# 2 x 2 x 2 worked example: D_1 = [[-6, 7], [-2, 2]], D_2 = [[-6, 3], [-18, -2]]
EXAMPLE_A = [[[-6.0, 5.0], [-10.0, 0.0]], [[0.0, 2.0], [8.0, 2.0]]]
EXAMPLE_B = [[[1.0], [1.0]], [[1.0], [1.0]]]
EXAMPLE_DESIRED = [[(-2.0, 5.0), (-2.0, -5.0)], [(-10.0, 10.0), (-10.0, -10.0)]]


def random_tensor(rng, rows, cols, tubes, complex_=False) -> Tensor3:
    values = rng.standard_normal((tubes, rows, cols))
    if complex_:
        values = values + 1j * rng.standard_normal((tubes, rows, cols))
    return Tensor3(values)


def shift_first_slice(a: Tensor3, shift: float) -> Tensor3:
    """a - shift·I in the first frontal slice, i.e. every D_i moves by -shift"""
    slices = np.array(a.slices)
    slices[0] -= shift * np.eye(a.rows)
    return Tensor3(slices)


def shifted_stable(rng, n, tubes, margin=0.1) -> Tensor3:
    """Random real tensor moved so its spectral abscissa is -margin"""
    a = random_tensor(rng, n, n, tubes)
    return shift_first_slice(a, float(np.max(slice_spectra(a).real)) + margin)


def symmetric_spectral_tensor(rng, n, tubes, top) -> Tensor3:
    """Real tensor whose D_i are real symmetric, largest eigenvalue over all slices ``top``"""
    slices = np.zeros((tubes, n, n))
    for j in range(tubes // 2 + 1):
        s = rng.standard_normal((n, n))
        s = (s + s.T) / 2
        slices[j] = s
        slices[(-j) % tubes] = s
    a = Tensor3(slices)
    return shift_first_slice(a, float(np.max(slice_spectra(a).real)) - top)


def tensor_doc(slices):
    arr = np.asarray(slices, dtype=float)
    tubes, rows, cols = arr.shape
    return {"shape": [rows, cols, tubes], "slices": arr.tolist()}


def write_system(path, a, b, **extra):
    doc = {"schema": 1, "a": tensor_doc(a), "b": tensor_doc(b)}
    doc.update(extra)
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def example_file(path, **extra):
    return write_system(path, EXAMPLE_A, EXAMPLE_B, **extra)
