"""
Static HTML charts of finished trajectories
"""

import logging
from pathlib import Path
from typing import Sequence, Union

import plotly.graph_objects as go
from plotly.subplots import make_subplots

from src.core.mlti import Trajectory
from src.reporting.trajectory_writer import trajectory_frame

logger = logging.getLogger(__name__)


def create_trajectory_chart(trajectories: Sequence[Trajectory], title: str = "") -> go.Figure:
    """One row per trajectory, one trace per state entry"""
    if not trajectories:
        raise ValueError("no trajectory to plot")

    fig = make_subplots(
        rows=len(trajectories),
        cols=1,
        shared_xaxes=True,
        vertical_spacing=0.08,
        subplot_titles=[t.label for t in trajectories],
    )
    for row, traj in enumerate(trajectories, start=1):
        df = trajectory_frame(traj)
        for name in df.columns[1:]:
            fig.add_trace(
                go.Scatter(x=df["t"], y=df[name], mode="lines", name=f"{traj.label} {name}"),
                row=row,
                col=1,
            )
        fig.update_yaxes(title_text="state", row=row, col=1)

    fig.update_xaxes(title_text="t [s]", row=len(trajectories), col=1)
    fig.update_layout(
        title=title,
        height=320 * len(trajectories) + 120,
        template="plotly_white",
        hovermode="x unified",
    )
    return fig


def write_chart_html(
    trajectories: Sequence[Trajectory], path: Union[str, Path], title: str = ""
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    create_trajectory_chart(trajectories, title).write_html(str(path), include_plotlyjs=True)
    logger.info("chart written to %s", path)
    return path
