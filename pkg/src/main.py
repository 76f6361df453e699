"""
TensorMLTI command line entry point

    mlti analyze  system.json        spectra, eigentuples, stability, controllability
    mlti place    system.json        eigentuple placement by state feedback
    mlti simulate system.json        open- and closed-loop trajectories
    mlti info     [system.json]      version, settings and file summary

Exit codes: 0 ok, 1 usage/parse/numerical error, 2 valid but unstable analysis.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from src import __version__
from src.config.settings import get_settings, override_settings
from src.core.control import (
    BMode,
    ControllabilityMode,
    FeedbackGain,
    closed_loop,
    closed_loop_spectra,
    ctrb_check,
    design_feedback,
)
from src.core.errors import MltiError, ParseError
from src.core.mlti import MltiSystem, Trajectory, simulate, stability
from src.core.spectral import Assembly, teig
from src.core.system_file import (
    SimulateBlock,
    SystemFile,
    TensorSpec,
    load_system_file,
    write_system_file,
)
from src.core.tensor import Tensor3
from src.reporting.charts import write_chart_html
from src.reporting.report import (
    controllability_entry,
    gain_entry,
    new_report,
    stability_entry,
    teig_diagnostics,
    write_report,
)
from src.reporting.trajectory_writer import write_plot_data, write_trajectory_csv
from src.utils.logger import setup_logger

logger = logging.getLogger("src.main")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSTABLE = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1, code 2 is reserved for unstable systems"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _system_summary(sys_: MltiSystem) -> Dict[str, int]:
    return {"states": sys_.states, "inputs": sys_.inputs, "tubes": sys_.tubes}


def _design(
    sys_: MltiSystem, doc: SystemFile, b_mode: Optional[str], assembly: Optional[str]
) -> FeedbackGain:
    if doc.design is None:
        raise ParseError("command needs a design block", field="design")
    return design_feedback(
        sys_,
        doc.design.desired_spectra(),
        b_mode=b_mode or doc.design.b_mode,
        assembly=assembly or doc.design.assembly,
    )


def cmd_analyze(args) -> int:
    doc = load_system_file(args.file)
    sys_ = doc.system()

    decomposition = teig(sys_.a, conjugate_pairing=True)
    report = stability(sys_)
    modes = list(ControllabilityMode) if args.mode == "all" else [ControllabilityMode(args.mode)]
    controllability = [ctrb_check(sys_, mode) for mode in modes]

    out = new_report("analyze", args.file)
    out["system"] = _system_summary(sys_)
    out["stability"] = stability_entry(report)
    out["controllability"] = [controllability_entry(c) for c in controllability]
    out["diagnostics"] = teig_diagnostics(sys_.a, decomposition)
    write_report(out, args.output_dir, f"{Path(args.file).stem}_analyze")

    for row, spectrum in enumerate(report.per_slice_spectra, start=1):
        logger.info("D_%d eigenvalues: %s", row, np.array2string(spectrum, precision=4))
    if not report.stable:
        logger.warning("system is unstable (max real part %.6g)", report.max_real_part)
        return EXIT_UNSTABLE
    logger.info("system is stable, decay rate %.6g", report.decay_rate)
    return EXIT_OK


def cmd_place(args) -> int:
    doc = load_system_file(args.file)
    sys_ = doc.system()

    chosen = _design(sys_, doc, args.mode, args.assembly)
    out = new_report("place", args.file)
    out["system"] = _system_summary(sys_)
    out["chosen"] = gain_entry(chosen, closed_loop_spectra(sys_, chosen))

    if chosen.paper_compat:
        # the spectral / normalized-idft design is the one whose spectra are exact
        try:
            sound = design_feedback(sys_, chosen.desired_spectra)
            out["sound"] = gain_entry(sound, closed_loop_spectra(sys_, sound))
        except MltiError as e:
            logger.warning("sound design not available: %s", e)
            out["sound"] = {
                "bMode": BMode.SPECTRAL.value,
                "assembly": Assembly.NORMALIZED_IDFT.value,
                "error": str(e),
            }

    stem = Path(args.file).stem
    write_report(out, args.output_dir, f"{stem}_place")
    gain_doc = doc.model_copy(update={"k": TensorSpec.from_tensor(chosen.k)})
    path = write_system_file(gain_doc, Path(args.output_dir) / f"{stem}_gain.json")
    logger.info("gain tensor written to %s", path)

    for i, k in enumerate(chosen.per_slice_gains, start=1):
        logger.info("K_%d = %s", i, np.array2string(np.ravel(k), precision=4))
    for j in range(chosen.k.tubes):
        logger.info("K^(%d) = %s", j + 1, np.array2string(chosen.k.slices[j].ravel(), precision=4))
    return EXIT_OK


def _simulate_block(doc: SystemFile, args) -> SimulateBlock:
    base = doc.simulate
    t_final = args.tfinal if args.tfinal is not None else (base.t_final if base else None)
    step = args.step if args.step is not None else (base.step if base else None)
    if t_final is None or step is None:
        raise ParseError("simulate needs tFinal and step (file or --tfinal/--step)", "simulate")
    try:
        return SimulateBlock(
            t_final=t_final, step=step, input=base.input if base else "zero"
        )
    except ValueError as e:
        raise ParseError(str(e), field="simulate") from e


def _write_run(traj: Trajectory, output_dir: Path, stem: str) -> Dict[str, object]:
    name = traj.label.replace("-", "_")
    csv_path = write_trajectory_csv(traj, output_dir / f"{stem}_{name}.csv")
    plot_path = write_plot_data(traj, output_dir / f"{stem}_{name}_plot.csv")
    norms = traj.norms()
    return {
        "label": traj.label,
        "points": len(traj.times),
        "initialNorm": float(norms[0]),
        "finalNorm": float(norms[-1]),
        "maxNorm": float(np.max(norms)),
        "csv": csv_path.name,
        "plotData": plot_path.name,
    }


def cmd_simulate(args) -> int:
    doc = load_system_file(args.file)
    sys_ = doc.system()
    block = _simulate_block(doc, args)
    grid = block.grid()

    x0 = doc.initial_state()
    if x0 is None:
        logger.warning("no x0 in file, starting from zero")
        x0 = Tensor3.zeros(sys_.states, 1, sys_.tubes)

    runs: List[Trajectory] = [
        _labelled(simulate(sys_, x0, block.signal(), grid), "open-loop")
    ]
    k = doc.gain()
    if k is None and doc.design is not None:
        k = _design(sys_, doc, args.mode, args.assembly).k
    if k is not None:
        runs.append(
            _labelled(simulate(closed_loop(sys_, k), x0, block.signal(), grid), "closed-loop")
        )

    output_dir = Path(args.output_dir)
    stem = Path(args.file).stem
    out = new_report("simulate", args.file)
    out["system"] = _system_summary(sys_)
    out["grid"] = {"tFinal": float(grid[-1]), "step": block.step, "points": len(grid)}
    out["runs"] = [_write_run(traj, output_dir, stem) for traj in runs]
    if args.html:
        path = write_chart_html(runs, output_dir / f"{stem}_trajectories.html", title=stem)
        out["chart"] = path.name
    write_report(out, output_dir, f"{stem}_simulate")
    return EXIT_OK


def _labelled(traj: Trajectory, label: str) -> Trajectory:
    return Trajectory(times=traj.times, states=traj.states, inputs=traj.inputs, label=label)


def cmd_info(args) -> int:
    settings = get_settings()
    print(f"TensorMLTI {__version__}")
    for key, value in settings.model_dump().items():
        print(f"  {key:<20} {value}")
    if args.file:
        doc = load_system_file(args.file)
        sys_ = doc.system()
        print(f"{Path(args.file).name}:")
        print(f"  a        {list(doc.a.shape)}")
        print(f"  b        {list(doc.b.shape)}")
        print(f"  x0       {list(doc.x0.shape) if doc.x0 else '-'}")
        print(f"  k        {list(doc.k.shape) if doc.k else '-'}")
        print(f"  design   {'yes' if doc.design else '-'}")
        print(f"  simulate {'yes' if doc.simulate else '-'}")
        print(f"  states={sys_.states} inputs={sys_.inputs} tubes={sys_.tubes}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    common = _Parser(add_help=False)
    common.add_argument("--output-dir", default=settings.output_dir, help="output directory")
    common.add_argument("--tol", type=float, default=None, help="rank tolerance override")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    parser = _Parser(prog="mlti", description="t-product MLTI system analysis and control")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="stability and controllability")
    analyze.add_argument("file")
    analyze.add_argument(
        "--mode",
        choices=["all"] + [m.value for m in ControllabilityMode],
        default="all",
        help="controllability test",
    )
    analyze.set_defaults(handler=cmd_analyze)

    design_flags = _Parser(add_help=False)
    design_flags.add_argument(
        "--mode", choices=[m.value for m in BMode], default=None, help="input map per slice"
    )
    design_flags.add_argument(
        "--assembly", choices=[a.value for a in Assembly], default=None, help="gain assembly"
    )

    place = sub.add_parser("place", parents=[common, design_flags], help="eigentuple placement")
    place.add_argument("file")
    place.set_defaults(handler=cmd_place)

    sim = sub.add_parser("simulate", parents=[common, design_flags], help="trajectories")
    sim.add_argument("file")
    sim.add_argument("--step", type=float, default=None, help="grid step [s]")
    sim.add_argument("--tfinal", type=float, default=None, help="final time [s]")
    sim.add_argument("--html", action="store_true", help="also write an HTML chart")
    sim.set_defaults(handler=cmd_simulate)

    info = sub.add_parser("info", parents=[common], help="version, settings, file summary")
    info.add_argument("file", nargs="?")
    info.set_defaults(handler=cmd_info)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    setup_logger(level=args.log_level or settings.log_level, log_dir=settings.log_dir)
    if args.tol is not None:
        override_settings(rank_tol=args.tol, tubal_rank_tol=args.tol)

    try:
        return args.handler(args)
    except MltiError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR
    except Exception:
        logger.exception("unexpected failure")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
