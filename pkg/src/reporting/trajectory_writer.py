"""
Trajectory CSV and plot-data files
"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from src.core.errors import ConsistencyError
from src.core.mlti import Trajectory

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.14e"


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """One row per grid point: ``t`` then ``x_r_c_k`` in row-major (r, c, k) order"""
    values = traj.as_matrix()
    if np.iscomplexobj(values):
        raise ConsistencyError(f"{traj.label} has complex states, CSV output needs real ones")
    df = pd.DataFrame(values, columns=traj.column_labels())
    df.insert(0, "t", traj.times)
    return df


def plot_frame(traj: Trajectory) -> pd.DataFrame:
    """Two columns per signal, ``t_<name>`` next to ``<name>``"""
    df = trajectory_frame(traj)
    columns = {}
    for name in df.columns[1:]:
        columns[f"t_{name}"] = df["t"]
        columns[name] = df[name]
    return pd.DataFrame(columns)


def write_trajectory_csv(traj: Trajectory, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(traj).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("%s: %d grid points written to %s", traj.label, len(traj.times), path)
    return path


def write_plot_data(traj: Trajectory, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    plot_frame(traj).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path
