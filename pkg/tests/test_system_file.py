import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.core.control import BMode
from src.core.errors import ConsistencyError, ParseError
from src.core.mlti import MltiSystem
from src.core.spectral import Assembly
from src.core.system_file import (
    SimulateBlock,
    SystemFile,
    TensorSpec,
    load_system_file,
    parse_system_file,
    write_system_file,
)
from src.core.tensor import Tensor3
from src.data_provider.signals import ConstantInput, SampledInput, ZeroInput
from tests.helpers import EXAMPLE_A, EXAMPLE_B, EXAMPLE_DESIRED, example_file, tensor_doc


def _doc(**extra):
    doc = {"schema": 1, "a": tensor_doc(EXAMPLE_A), "b": tensor_doc(EXAMPLE_B)}
    doc.update(extra)
    return doc


def _parse(doc):
    return parse_system_file(json.dumps(doc))


def test_load_example(tmp_path):
    doc = load_system_file(example_file(tmp_path / "example.json"))
    sys_ = doc.system()
    assert sys_.a.shape == (2, 2, 2)
    assert_array_equal(sys_.a.frontal_slice(0), [[-6.0, 5.0], [-10.0, 0.0]])
    assert_array_equal(sys_.b.frontal_slice(1), [[1.0], [1.0]])
    assert doc.initial_state() is None
    assert doc.gain() is None


def test_design_block():
    doc = _parse(_doc(design={"desired": EXAMPLE_DESIRED, "bMode": "first-block"}))
    assert doc.design.b_mode is BMode.FIRST_BLOCK
    assert doc.design.assembly is Assembly.NORMALIZED_IDFT
    assert doc.design.desired_spectra()[1] == [-10 + 10j, -10 - 10j]


def test_not_square_dynamics():
    a = np.zeros((2, 2, 3)).tolist()
    with pytest.raises(ParseError, match="dynamics tensor not square") as err:
        _parse(_doc(a=tensor_doc(a)))
    assert err.value.field == "a.shape"


def test_malformed_json():
    with pytest.raises(ParseError, match="invalid JSON"):
        parse_system_file("{ not json")


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_system_file(tmp_path / "absent.json")


def test_slice_count_must_match_shape():
    bad = {"shape": [2, 2, 3], "slices": EXAMPLE_A}
    with pytest.raises(ParseError) as err:
        _parse(_doc(a=bad))
    assert err.value.field == "a"
    assert "3 tubes" in str(err.value)


def test_non_numeric_entry_names_the_field():
    bad = tensor_doc(EXAMPLE_B)
    bad["slices"][1][0][0] = "x"
    with pytest.raises(ParseError) as err:
        _parse(_doc(b=bad))
    assert err.value.field == "b.slices.1.0.0"


@pytest.mark.parametrize(
    "extra,field",
    [
        ({"schema": 2}, "schema"),
        ({"design": {"desired": EXAMPLE_DESIRED[:1]}}, "design.desired"),
        ({"design": {"desired": [EXAMPLE_DESIRED[0], [[-1.0, 0.0]]]}}, "design.desired.1"),
        ({"b": tensor_doc(np.ones((2, 3, 1)))}, "b.shape"),
        ({"k": tensor_doc(np.ones((2, 2, 2)))}, "k.shape"),
        ({"x0": tensor_doc(np.ones((2, 3, 1)))}, "x0.shape"),
        ({"simulate": {"tFinal": -1.0, "step": 0.1}}, "simulate.tFinal"),
        ({"unexpected": 1}, "unexpected"),
    ],
)
def test_field_errors(extra, field):
    with pytest.raises(ParseError) as err:
        _parse(_doc(**extra))
    assert err.value.field == field


def test_round_trip_is_bit_identical(tmp_path, rng):
    a = Tensor3(rng.standard_normal((3, 2, 2)) * 1e3)
    b = Tensor3(rng.standard_normal((3, 2, 1)) / 7.0)
    x0 = Tensor3(rng.standard_normal((3, 2, 1)))
    doc = SystemFile.from_system(MltiSystem(a=a, b=b), x0=x0)
    back = load_system_file(write_system_file(doc, tmp_path / "out" / "round.json"))
    assert_array_equal(back.system().a.slices, a.slices)
    assert_array_equal(back.system().b.slices, b.slices)
    assert_array_equal(back.initial_state().slices, x0.slices)
    assert back.k is None


def test_grid():
    assert_allclose(SimulateBlock(tFinal=1.0, step=0.25).grid(), [0, 0.25, 0.5, 0.75, 1.0])
    grid = SimulateBlock(tFinal=1.0, step=0.3).grid()
    assert_allclose(grid, [0, 0.3, 0.6, 0.9, 1.0])
    assert np.all(np.diff(grid) > 0)


def test_input_signals():
    u = tensor_doc(np.ones((2, 1, 1)))
    assert isinstance(SimulateBlock(tFinal=1, step=1).signal(), ZeroInput)
    block = SimulateBlock(tFinal=1, step=1, input={"kind": "constant", "values": u})
    assert isinstance(block.signal(), ConstantInput)
    block = SimulateBlock(tFinal=1, step=1, input={"kind": "samples", "values": [u, u]})
    assert isinstance(block.signal(), SampledInput)


def test_constant_input_needs_values():
    with pytest.raises(ParseError) as err:
        _parse(_doc(simulate={"tFinal": 1, "step": 0.5, "input": {"kind": "constant"}}))
    assert err.value.field.startswith("simulate.input")


def test_input_sample_shape_checked():
    # 2 x 1 x 2 samples for a single-input system
    u = tensor_doc(np.ones((2, 2, 1)))
    simulate = {"tFinal": 1, "step": 0.5, "input": {"kind": "constant", "values": u}}
    with pytest.raises(ParseError) as err:
        _parse(_doc(simulate=simulate))
    assert err.value.field == "simulate.input.values"


def test_saved_tensors_are_real():
    nearly_real = Tensor3(np.array([[[1.0 + 1e-14j]]]))
    assert TensorSpec.from_tensor(nearly_real).slices == [[[1.0]]]
    with pytest.raises(ConsistencyError):
        TensorSpec.from_tensor(Tensor3(np.array([[[1.0 + 1.0j]]])))
