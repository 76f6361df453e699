import numpy as np
import pytest
import scipy.linalg as la
from numpy.testing import assert_allclose

from src.core.control import closed_loop
from src.core.errors import NonMonotoneGrid, NotSquare, ShapeMismatch
from src.core.mlti import MltiSystem, Trajectory, simulate, stability, zero_input_solution
from src.core.tensor import Tensor3, bcirc, fold, identity_tensor, matvec_unfold
from src.data_provider.signals import ConstantInput, SampledInput, StateFeedbackInput, ZeroInput
from tests.helpers import random_tensor, shifted_stable


def _rk4(f, x, t_end, h):
    for _ in range(int(round(t_end / h))):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def test_system_shape_checks(rng):
    with pytest.raises(NotSquare, match="dynamics tensor not square"):
        MltiSystem(a=random_tensor(rng, 2, 3, 2), b=random_tensor(rng, 2, 1, 2))
    with pytest.raises(ShapeMismatch):
        MltiSystem(a=random_tensor(rng, 2, 2, 2), b=random_tensor(rng, 3, 1, 2))
    with pytest.raises(ShapeMismatch):
        MltiSystem(a=random_tensor(rng, 2, 2, 2), b=random_tensor(rng, 2, 1, 3))


def test_zero_input_solution(example_system, rng):
    x0 = random_tensor(rng, 2, 1, 2)
    assert zero_input_solution(example_system, x0, 0.0) is x0
    lifted = la.expm(bcirc(example_system.a).matrix * 0.7) @ matvec_unfold(x0)
    assert_allclose(
        zero_input_solution(example_system, x0, 0.7).slices, fold(lifted, 2, 2).slices, atol=1e-10
    )


def test_zero_state_zero_input_stays_at_zero(example_system):
    traj = simulate(example_system, Tensor3.zeros(2, 1, 2), ZeroInput(), np.linspace(0, 1, 11))
    assert all(s.norm() == 0.0 for s in traj.states)


def test_constant_input_on_zero_dynamics_is_linear():
    b = Tensor3(np.array([[[1.0], [2.0]], [[0.5], [0.0]]]))
    sys_ = MltiSystem(a=Tensor3.zeros(2, 2, 2), b=b)
    u = Tensor3(np.array([[[2.0]], [[1.0]]]))
    grid = [0.0, 0.5, 1.0, 2.5]
    traj = simulate(sys_, Tensor3.zeros(2, 1, 2), ConstantInput(u), grid)
    rate = b @ u
    for t, state in zip(grid, traj.states):
        assert_allclose(state.slices, (t * rate).slices, atol=1e-12)


def test_constant_input_matches_rk4_on_lifted_system(rng):
    a = shifted_stable(rng, 2, 3)
    b = random_tensor(rng, 2, 1, 3)
    sys_ = MltiSystem(a=a, b=b)
    x0 = random_tensor(rng, 2, 1, 3)
    u = random_tensor(rng, 1, 1, 3)
    traj = simulate(sys_, x0, ConstantInput(u), np.linspace(0.0, 1.0, 11))

    a_c = bcirc(a).matrix
    forcing = bcirc(b).matrix @ matvec_unfold(u)
    oracle = _rk4(lambda x: a_c @ x + forcing, matvec_unfold(x0), 1.0, 1e-4)
    result = matvec_unfold(traj.states[-1])
    assert np.linalg.norm(result - oracle) <= 1e-6 * np.linalg.norm(oracle)


def test_sampled_input_held_between_points():
    sys_ = MltiSystem(a=Tensor3.zeros(1, 1, 1), b=Tensor3(np.ones((1, 1, 1))))
    values = [Tensor3(np.full((1, 1, 1), v)) for v in (1.0, -2.0, 0.0)]
    traj = simulate(sys_, Tensor3.zeros(1, 1, 1), SampledInput(values), [0.0, 1.0, 1.5])
    assert_allclose([s.slices[0, 0, 0] for s in traj.states], [0.0, 1.0, 0.0], atol=1e-14)


def test_sampled_input_too_short(example_system):
    u = SampledInput([Tensor3.zeros(1, 1, 2)])
    with pytest.raises(ShapeMismatch):
        simulate(example_system, Tensor3.zeros(2, 1, 2), u, [0.0, 1.0, 2.0])


def test_input_shape_checked(example_system):
    with pytest.raises(ShapeMismatch):
        simulate(
            example_system, Tensor3.zeros(2, 1, 2), ConstantInput(Tensor3.zeros(2, 1, 2)), [0, 1]
        )


def test_state_feedback_input(example_system, rng):
    k = random_tensor(rng, 1, 2, 2)
    x = random_tensor(rng, 2, 1, 2)
    u = StateFeedbackInput(k).sample(0, 0.0, x)
    assert_allclose(u.slices, (-(k @ x)).slices)


def test_state_feedback_is_held_between_grid_points(rng):
    sys_ = MltiSystem(a=shifted_stable(rng, 2, 3), b=random_tensor(rng, 2, 1, 3))
    k = 0.5 * random_tensor(rng, 1, 2, 3)
    x0 = random_tensor(rng, 2, 1, 3)

    def gap(h):
        grid = np.linspace(0.0, 1.0, int(round(1.0 / h)) + 1)
        held = simulate(sys_, x0, StateFeedbackInput(k), grid)
        continuous = simulate(closed_loop(sys_, k), x0, None, grid)
        diff = max((x - y).norm() for x, y in zip(held.states, continuous.states))
        return diff / max(continuous.norms())

    coarse, medium, fine = gap(0.02), gap(0.01), gap(0.005)
    assert 1e-8 < medium < 0.1
    assert fine < 0.75 * medium < 0.75 * coarse


def test_superposition_of_free_and_forced_responses(rng):
    sys_ = MltiSystem(a=shifted_stable(rng, 3, 4), b=random_tensor(rng, 3, 2, 4))
    x0 = random_tensor(rng, 3, 1, 4)
    u = ConstantInput(random_tensor(rng, 2, 1, 4))
    grid = np.linspace(0.0, 2.0, 9)
    both = simulate(sys_, x0, u, grid)
    free = simulate(sys_, x0, None, grid)
    forced = simulate(sys_, Tensor3.zeros(3, 1, 4), u, grid)
    for total, x, y in zip(both.states, free.states, forced.states):
        assert_allclose(total.slices, (x + y).slices, atol=1e-12 * max(1.0, total.norm()))


@pytest.mark.parametrize("grid", [[0.1, 0.2], [0.0, 0.5, 0.5], [0.0, 1.0, 0.5], []])
def test_bad_grids(example_system, grid):
    with pytest.raises(NonMonotoneGrid):
        simulate(example_system, Tensor3.zeros(2, 1, 2), None, grid)


def test_state_shape_checked(example_system):
    with pytest.raises(ShapeMismatch):
        simulate(example_system, Tensor3.zeros(3, 1, 2), None, [0.0])


def test_trajectory_layout():
    states = [Tensor3.from_array(np.arange(4.0).reshape(2, 2, 1) + t) for t in range(3)]
    traj = Trajectory(times=np.array([0.0, 1.0, 2.0]), states=states)
    assert traj.column_labels() == ["x_1_1_1", "x_1_2_1", "x_2_1_1", "x_2_2_1"]
    assert traj.as_matrix().shape == (3, 4)
    with pytest.raises(ShapeMismatch):
        Trajectory(times=np.array([0.0]), states=states)


def test_column_order_is_row_col_tube():
    t = Tensor3.from_array(np.arange(8.0).reshape(2, 2, 2))
    traj = Trajectory(times=np.array([0.0]), states=[t])
    assert traj.column_labels()[:3] == ["x_1_1_1", "x_1_1_2", "x_1_2_1"]
    assert_allclose(traj.as_matrix()[0], np.arange(8.0))


def test_example_stability(example_system):
    report = stability(example_system)
    assert report.stable
    assert report.max_real_part == pytest.approx(-2 + np.sqrt(2), abs=1e-12)
    assert report.decay_rate == pytest.approx(2 - np.sqrt(2), abs=1e-12)
    assert len(report.eigentuples) == 2


def test_identity_dynamics_unstable():
    sys_ = MltiSystem(a=identity_tensor(2, 3), b=Tensor3.zeros(2, 1, 3))
    report = stability(sys_)
    assert not report.stable
    assert report.max_real_part == pytest.approx(1.0)
    assert report.decay_rate == pytest.approx(-1.0)
