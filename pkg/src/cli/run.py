import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from src.baselines.pfl import (
    ROBOT_MOVING_MASS_KG,
    TS15066_DEFAULTS,
    PFLParams,
    contact_force_limit,
    effective_mass_ts15066,
    pfl_force,
    pfl_force_predictor,
    pfl_max_velocity,
    robot_params,
)
from src.dataio.Measurement import GridSpec, MeasurementSet
from src.dataio.csv_io import read_dataset_file, read_trace_file, serialize_datasets
from src.dataio.grids import REFERENCE_GRIDS, parse_levels
from src.dataio.preprocessing import filter_valid_report, split_train_test_report, state_statistics
from src.dataio.synthesis import synthesize_dataset
from src.evaluation.ContactStateMachine import ForceTrace, classify_contact
from src.evaluation.PredictorRegistry import PredictorRegistry
from src.evaluation.metrics import estimation_errors, render_report_table, reports_to_csv
from src.fitting.CFMModel import dumps_model, load_model
from src.fitting.Pipeline import CFMPipeline
from src.fitting.cfm2d import PerHeightPredictor, fit_cfm2d_per_height
from src.fitting.reference_models import REFERENCE_MODELS
from src.fitting.terms import CFM2D_TERMS
from src.mechanics.PlanarArm import (
    DEFAULT_EE_ORIENTATION_RAD,
    DEFAULT_ARM,
    Elbow,
    ImpactDirection,
    InertiaModel,
    load_arm,
    save_arm,
)
from src.mechanics.effective_mass import effective_mass, effective_mass_map
from src.mechanics.kinematics import ik_planar3
from src.prediction.WorkspaceMap import render_map
from src.prediction.maps import force_map, speed_map
from src.prediction.safe_speed import SafetyQuery, check_velocity_monotone, evaluate_force, max_safe_velocity
from src.shared.config import (
    DEFAULT_MARGIN_FACTOR,
    DEVICE_FORCE_LIMIT_N,
    FORCE_LIMIT_QUASI_STATIC_N,
    FORCE_LIMIT_TRANSIENT_N,
    HAND_SPRING_CONSTANT_NPM,
    MAX_WORKERS,
    NOISE_FLOOR_N,
    ONSET_THRESHOLD_N,
    P_VALUE_ALPHA,
    POOL_DEGREE,
    SCORE_RMSE_SCALE,
    STATE_TOLERANCE,
    STOP_THRESHOLD,
    TRANSIENT_WINDOW_S,
)
from src.shared.errors import CFMError, ContractError
from src.shared.logger_manager import configure_logging
from src.shared.utils import format_number, mass_as_float, parse_mass
from src.tasks.recovery_study import run_recovery_study

logger = logging.getLogger("default")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

# dense default sweep for effective-mass maps of the planar arm
EFFMASS_DISTANCES = tuple(np.round(np.arange(0.50, 0.951, 0.05), 10))
EFFMASS_HEIGHTS = tuple(np.round(np.arange(0.10, 0.501, 0.05), 10))


# --------------------------- argument types --------------------------- #

def _number(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if math.isnan(value):
        raise argparse.ArgumentTypeError("NaN is not allowed")
    return value


def positive_float(text):
    value = _number(text)
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def non_negative_float(text):
    value = _number(text)
    if not (value >= 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def finite_float(text):
    value = _number(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text}")
    return value


def margin_float(text):
    value = _number(text)
    if not (value >= 1 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"margin must be >= 1, got {text}")
    return value


def open_unit_float(text):
    value = _number(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def mass_value(text):
    try:
        mass = parse_mass(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is neither a mass nor 'inf'")
    if not isinstance(mass, float):
        return mass
    if not (mass > 0 and math.isfinite(mass)):
        raise argparse.ArgumentTypeError(f"mass must be > 0 or 'inf', got {text}")
    return mass


def levels(text):
    try:
        values = parse_levels(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers")
    if not values:
        raise argparse.ArgumentTypeError("level list is empty")
    return values


def direction(text):
    try:
        x, y = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"direction must be 'ux,uy', got {text!r}")
    if x == 0 and y == 0:
        raise argparse.ArgumentTypeError("direction cannot be the zero vector")
    return ImpactDirection.normalized(x, y)


# --------------------------- shared helpers --------------------------- #

def resolve_model(name_or_path):
    """A reference model name or a model file path."""
    if name_or_path in REFERENCE_MODELS:
        return REFERENCE_MODELS[name_or_path]
    return load_model(name_or_path)


def emit(text, out=None):
    """Write results to --out or stdout."""
    if out:
        Path(out).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def grid_from_args(args, need_velocity=False, default=None):
    if args.grid:
        grid = REFERENCE_GRIDS[args.grid]
    elif args.d_levels and args.h_levels:
        grid = GridSpec(args.d_levels, args.h_levels, getattr(args, "v_levels", None) or ())
    elif default is not None:
        grid = default
    else:
        raise ContractError("give --grid or both --d-levels and --h-levels")
    if need_velocity and not grid.has_velocity:
        raise ContractError("this command needs velocity levels (--v-levels)")
    return grid


def read_datasets(paths, max_force_n=None):
    """All datasets of all files, optionally filtered at max_force_n."""
    datasets = []
    for path in paths:
        datasets.extend(read_dataset_file(path).values())
    if max_force_n is not None:
        datasets = [filter_valid_report(ds, max_force_n).kept for ds in datasets]
    return datasets


def read_single_dataset(path, label=None):
    datasets = read_dataset_file(path)
    if label is not None:
        if label not in datasets:
            raise ContractError(f"label {label!r} not in {path} (found {', '.join(datasets)})")
        return datasets[label]
    if len(datasets) > 1:
        raise ContractError(f"{path} holds several labels ({', '.join(datasets)}); pick one with --label")
    return next(iter(datasets.values()))


def merged(datasets, label):
    return MeasurementSet(tuple(s for ds in datasets for s in ds.samples), label)


def _flags_suffix(flags):
    return f" [{', '.join(flags)}]" if flags else ""


def add_grid_arguments(parser, velocity=False):
    parser.add_argument("--grid", choices=sorted(REFERENCE_GRIDS), help="named measurement grid")
    parser.add_argument("--d-levels", type=levels, help="distance levels, comma-separated (m)")
    parser.add_argument("--h-levels", type=levels, help="height levels, comma-separated (m)")
    if velocity:
        parser.add_argument("--v-levels", type=levels, help="velocity levels, comma-separated (m/s)")


def add_model_argument(parser):
    parser.add_argument(
        "--model",
        required=True,
        help=f"model file (JSON) or reference name: {', '.join(REFERENCE_MODELS)}",
    )


def add_out_argument(parser):
    parser.add_argument("--out", help="write the result to this file instead of stdout")


# --------------------------- subcommands --------------------------- #

def cmd_fit(args):
    datasets = read_datasets(args.data, args.max_force)
    pipeline = CFMPipeline(args.pool_degree, args.alpha, args.stop, rmse_scale=args.rmse_scale, max_workers=args.workers)
    for dataset in datasets:
        pipeline.register_dataset(dataset)
    models = pipeline.run()
    text = [pipeline.report()] + [model.describe() for model in models]
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for model in models:
            path = out_dir / f"{model.label}.model"
            path.write_text(dumps_model(model), encoding="utf-8")
            text.append(f"wrote {path}")
    emit("\n".join(text) + "\n", args.out)


def cmd_fit2d(args):
    dataset = read_single_dataset(args.data, args.label)
    models = fit_cfm2d_per_height(dataset, args.tolerance)
    if args.height is not None:
        models = {h: m for h, m in models.items() if abs(h - args.height) <= args.tolerance}
        if not models:
            raise ContractError(f"no samples at height {args.height} m")
    lines = ["h_m,b0,b1_v,b2_d,b3_d2,rmse,r2"]
    for height, model in models.items():
        coefficients = [model.coefficient(t) for t in CFM2D_TERMS]
        cells = [format_number(height)] + [format_number(c) for c in coefficients]
        cells += [format_number(model.diagnostics.rmse), format_number(model.diagnostics.r2)]
        lines.append(",".join(cells))
    emit("\n".join(lines) + "\n", args.out)


def cmd_predict(args):
    model = resolve_model(args.model)
    prediction = evaluate_force(model, args.distance, args.height, args.velocity)
    flags = () if prediction.in_domain else ("out_of_domain",)
    emit(f"{format_number(prediction.force_n)} N{_flags_suffix(flags)}\n", args.out)


def cmd_safe_speed(args):
    model = resolve_model(args.model)
    if model.domain is not None:
        check_velocity_monotone(model)
    query = SafetyQuery(args.distance, args.height, args.fmax, args.margin)
    result = max_safe_velocity(model, query, args.v_max)
    flags = tuple(name for name in ("clamped", "extrapolated") if getattr(result, name))
    emit(f"{format_number(result.velocity_mps)} m/s{_flags_suffix(flags)}\n", args.out)


def cmd_force_map(args):
    model = resolve_model(args.model)
    workspace_map = force_map(model, grid_from_args(args), args.velocity)
    emit(render_map(workspace_map, args.format), args.out)


def cmd_speed_map(args):
    model = resolve_model(args.model)
    template = SafetyQuery(0.0, 0.0, args.fmax, args.margin)
    workspace_map = speed_map(model, grid_from_args(args), template, max_workers=args.workers)
    emit(render_map(workspace_map, args.format), args.out)


def _arm_from_args(args):
    arm = load_arm(args.arm) if args.arm else DEFAULT_ARM
    if args.inertia_model:
        arm = arm.with_inertia_model(InertiaModel(args.inertia_model))
    if args.save_arm:
        save_arm(arm, args.save_arm)
    return arm


def cmd_effmass(args):
    arm = _arm_from_args(args)
    if args.distance is not None or args.height is not None:
        if args.distance is None or args.height is None:
            raise ContractError("a single point needs both -d and -H")
        q = ik_planar3(arm, (args.distance, args.height), args.orientation, Elbow(args.elbow))
        mass = effective_mass(arm, q, args.direction)
        angles = " ".join(format_number(a) for a in q.angles_rad)
        emit(f"{format_number(mass_as_float(mass))} kg (q = {angles} rad)\n", args.out)
        return
    default = GridSpec(EFFMASS_DISTANCES, EFFMASS_HEIGHTS)
    workspace_map = effective_mass_map(
        arm, grid_from_args(args, default=default), args.direction, args.orientation, Elbow(args.elbow), args.workers
    )
    emit(render_map(workspace_map, args.format), args.out)


def cmd_baseline(args):
    if args.baseline == "mass":
        moving_mass = args.moving_mass if args.moving_mass is not None else ROBOT_MOVING_MASS_KG[args.robot]
        emit(f"{format_number(effective_mass_ts15066(moving_mass, args.payload))} kg\n", args.out)
        return
    f_max = args.fmax if args.fmax is not None else contact_force_limit(args.contact)
    if args.mr is not None:
        params = PFLParams(f_max, args.mr, args.k, args.mh)
    else:
        params = robot_params(args.robot, f_max, args.payload, args.k, args.mh)
    if args.baseline == "pfl":
        emit(f"{format_number(pfl_max_velocity(params))} m/s\n", args.out)
    else:
        # f_max is irrelevant to the force relation
        emit(f"{format_number(pfl_force(args.velocity, params))} N\n", args.out)


def _render_reports(reports, fmt):
    return reports_to_csv(reports) if fmt == "csv" else render_report_table(reports)


def cmd_evaluate(args):
    model = resolve_model(args.model)
    datasets = read_datasets(args.data, args.max_force)
    reports = {ds.label: estimation_errors(model, ds, ds.label) for ds in datasets}
    if len(datasets) > 1:
        reports["all"] = estimation_errors(model, merged(datasets, "all"), "all")
    emit(_render_reports(reports, args.format), args.out)


def cmd_compare(args):
    model = resolve_model(args.model)
    test = merged(read_datasets(args.data, args.max_force), "test")
    registry = PredictorRegistry()
    registry.register_model("3d-cfm", model, reference=True)
    if args.train_2d:
        train = read_single_dataset(args.train_2d)
        registry.register_predictor("2d-cfm", PerHeightPredictor(fit_cfm2d_per_height(train)))
    if args.pfl_mr is not None:
        registry.register_predictor(
            "pfl", pfl_force_predictor(PFLParams(FORCE_LIMIT_QUASI_STATIC_N, args.pfl_mr, args.k, args.mh))
        )
    elif args.pfl_robot:
        registry.register_predictor(
            "pfl", pfl_force_predictor(robot_params(args.pfl_robot, k_spring_npm=args.k, m_human_kg=args.mh))
        )
    table = registry.compare(test, max_workers=args.workers)
    emit(reports_to_csv(table.reports) if args.format == "csv" else table.render(), args.out)


def cmd_synth(args):
    model = resolve_model(args.model)
    grid = grid_from_args(args, need_velocity=True)
    dataset = synthesize_dataset(model, grid, args.noise, args.reps, args.seed, args.label)
    emit(serialize_datasets([dataset]), args.out)


def cmd_contact(args):
    times, forces = read_trace_file(args.trace)
    verdict = classify_contact(
        ForceTrace(tuple(times), tuple(forces)),
        args.window,
        args.qs_limit,
        args.transient_limit,
        args.onset_threshold,
        args.noise_floor,
    )
    lines = [
        f"kind: {verdict.kind}",
        f"compliant: {'yes' if verdict.compliant else 'no'}",
        f"onset_s: {format_number(verdict.onset_time_s)}",
        f"peak_n: {format_number(verdict.peak_force_n)}",
        f"sustained_n: {format_number(verdict.sustained_force_n)}",
    ]
    emit("\n".join(lines) + "\n", args.out)


def cmd_recovery(args):
    report = run_recovery_study(
        seeds=range(args.first_seed, args.first_seed + args.seeds),
        noise_sd_n=args.noise,
        repetitions=args.reps,
        max_workers=args.workers,
        progress=not args.no_progress,
    )
    emit(report.summary(), args.out)


def cmd_split(args):
    dataset = read_single_dataset(args.data, args.label)
    grid = grid_from_args(args, need_velocity=True)
    split = split_train_test_report(dataset, grid, args.tolerance)
    for warning in split.warnings:
        sys.stderr.write(f"warning: {warning}\n")
    Path(args.out_train).write_text(serialize_datasets([split.train]), encoding="utf-8")
    Path(args.out_test).write_text(serialize_datasets([split.test]), encoding="utf-8")
    emit(f"train: {len(split.train)} samples\ntest: {len(split.test)} samples\n", args.out)


def cmd_filter(args):
    results = [filter_valid_report(ds, args.max_force) for ds in read_datasets(args.data)]
    removed = sum(r.removed_count for r in results)
    sys.stderr.write(f"removed {removed} samples above {format_number(args.max_force)} N\n")
    for result in (r for r in results if len(r.kept)):
        stats = state_statistics(result.kept)
        sys.stderr.write(
            f"{result.kept.label}: repeatability SD mean {format_number(stats.mean_sd_n)} N,"
            f" max {format_number(stats.max_sd_n)} N\n"
        )
    emit(serialize_datasets([r.kept for r in results]), args.out)


# --------------------------- parser --------------------------- #

def build_parser():
    parser = argparse.ArgumentParser(
        prog="cfm",
        description="Collision force maps: fit impact-force models and derive safe robot speeds.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--log-file", help="also write the log to this file")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("fit", help="two-stage 3D CFM fit over one or more datasets")
    p.add_argument("--data", nargs="+", required=True, help="measurement CSV file(s); each label is one dataset")
    p.add_argument("--pool-degree", type=positive_int, default=POOL_DEGREE, help="maximum total degree of the term pool")
    p.add_argument("--alpha", type=open_unit_float, default=P_VALUE_ALPHA, help="p-value threshold of stage one")
    p.add_argument("--stop", type=non_negative_float, default=STOP_THRESHOLD, help="stage-two stop threshold (score units)")
    p.add_argument("--rmse-scale", choices=["force", "log"], default=SCORE_RMSE_SCALE, help="RMSE in the elimination score: N or ln(N)")
    p.add_argument("--max-force", type=positive_float, default=DEVICE_FORCE_LIMIT_N, help="discard samples above this force (N); equal is kept")
    p.add_argument("--workers", type=positive_int, default=MAX_WORKERS, help="threads for candidate refits")
    p.add_argument("--out-dir", help="write one <label>.model file per dataset here")
    add_out_argument(p)
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("fit2d", help="per-height 2D CFM fits (ln F = b0 + b1 v + b2 d + b3 d^2)")
    p.add_argument("--data", required=True, help="measurement CSV file")
    p.add_argument("--label", help="dataset label when the file holds several")
    p.add_argument("-H", "--height", type=positive_float, help="fit only this height (m)")
    p.add_argument("--tolerance", type=non_negative_float, default=STATE_TOLERANCE, help="height matching tolerance (m)")
    add_out_argument(p)
    p.set_defaults(handler=cmd_fit2d)

    p = sub.add_parser("predict", help="predicted impact force at one state")
    add_model_argument(p)
    p.add_argument("-d", "--distance", type=finite_float, required=True, help="distance from the base axis (m)")
    p.add_argument("-H", "--height", type=finite_float, required=True, help="height above the base (m)")
    p.add_argument("-v", "--velocity", type=finite_float, required=True, help="end-effector speed (m/s)")
    add_out_argument(p)
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("safe-speed", help="maximum speed keeping the margined force within a limit")
    add_model_argument(p)
    p.add_argument("-d", "--distance", type=finite_float, required=True, help="distance from the base axis (m)")
    p.add_argument("-H", "--height", type=finite_float, required=True, help="height above the base (m)")
    p.add_argument("--fmax", type=positive_float, default=FORCE_LIMIT_QUASI_STATIC_N, help="force limit (N)")
    p.add_argument("--margin", type=margin_float, default=DEFAULT_MARGIN_FACTOR, help="factor applied to predicted forces (>= 1)")
    p.add_argument("--v-max", type=positive_float, help="upper speed bound (m/s); default: model's highest training speed")
    add_out_argument(p)
    p.set_defaults(handler=cmd_safe_speed)

    p = sub.add_parser("force-map", help="predicted force over a (d, h) grid at a fixed speed")
    add_model_argument(p)
    add_grid_arguments(p)
    p.add_argument("-v", "--velocity", type=positive_float, required=True, help="end-effector speed (m/s)")
    p.add_argument("--format", choices=["csv", "grid"], default="csv", help="output layout")
    add_out_argument(p)
    p.set_defaults(handler=cmd_force_map)

    p = sub.add_parser("speed-map", help="safe speed over a (d, h) grid")
    add_model_argument(p)
    add_grid_arguments(p)
    p.add_argument("--fmax", type=positive_float, default=FORCE_LIMIT_QUASI_STATIC_N, help="force limit (N)")
    p.add_argument("--margin", type=margin_float, default=DEFAULT_MARGIN_FACTOR, help="factor applied to predicted forces (>= 1)")
    p.add_argument("--format", choices=["csv", "grid"], default="csv", help="output layout")
    p.add_argument("--workers", type=positive_int, default=MAX_WORKERS, help="threads for the sweep")
    add_out_argument(p)
    p.set_defaults(handler=cmd_speed_map)

    p = sub.add_parser("effmass", help="effective mass of a planar arm at a point or over a grid")
    p.add_argument("--arm", help="arm description JSON (default: 3-link arm, lengths 0.5/0.45/0.05 m, masses 13/4/4 kg)")
    p.add_argument("--inertia-model", choices=[m.value for m in InertiaModel], help="link inertia model")
    p.add_argument("--save-arm", help="write the arm description used to this JSON file")
    p.add_argument("-d", "--distance", type=finite_float, help="target distance (m); with -H gives a single point")
    p.add_argument("-H", "--height", type=finite_float, help="target height (m)")
    add_grid_arguments(p)
    p.add_argument("--direction", type=direction, default=ImpactDirection((0.0, -1.0)), help="impact direction 'ux,uy' (normalized)")
    p.add_argument("--orientation", type=finite_float, default=DEFAULT_EE_ORIENTATION_RAD, help="end-effector orientation (rad)")
    p.add_argument("--elbow", choices=[e.value for e in Elbow], default=Elbow.UP.value, help="inverse-kinematics branch")
    p.add_argument("--format", choices=["csv", "grid"], default="csv", help="output layout")
    p.add_argument("--workers", type=positive_int, default=MAX_WORKERS, help="threads for the sweep")
    add_out_argument(p)
    p.set_defaults(handler=cmd_effmass)

    p = sub.add_parser("baseline", help="TS 15066 power-and-force-limiting relations")
    p.add_argument("baseline", choices=["pfl", "force", "mass"], help="pfl: max speed, force: force at speed, mass: M/2 + m_L")
    p.add_argument("--robot", choices=sorted(ROBOT_MOVING_MASS_KG), default="ur10e", help="robot preset for the moving mass")
    p.add_argument("--contact", choices=["quasi-static", "transient"], default="quasi-static", help="contact type setting the force limit")
    p.add_argument("--fmax", type=positive_float, help="permissible force (N); overrides --contact")
    p.add_argument("--k", type=positive_float, default=TS15066_DEFAULTS["k_spring_npm"], help="body-part spring constant (N/m)")
    p.add_argument("--mr", type=positive_float, help="effective robot mass (kg); overrides --robot and --payload")
    p.add_argument("--mh", type=mass_value, default="inf", help="human body-part mass (kg) or 'inf'")
    p.add_argument("-v", "--velocity", type=non_negative_float, default=0.3, help="speed for 'force' (m/s)")
    p.add_argument("--moving-mass", type=non_negative_float, help="robot moving mass M for 'mass' (kg); overrides --robot")
    p.add_argument("--payload", type=non_negative_float, default=0.0, help="payload m_L (kg)")
    add_out_argument(p)
    p.set_defaults(handler=cmd_baseline)

    p = sub.add_parser("evaluate", help="under/overestimation errors of a model on measured data")
    add_model_argument(p)
    p.add_argument("--data", nargs="+", required=True, help="test measurement CSV file(s)")
    p.add_argument("--max-force", type=positive_float, default=DEVICE_FORCE_LIMIT_N, help="discard samples above this force (N)")
    p.add_argument("--format", choices=["text", "csv"], default="text", help="output layout")
    add_out_argument(p)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("compare", help="3D CFM against per-height 2D CFM and PFL on test data")
    add_model_argument(p)
    p.add_argument("--data", nargs="+", required=True, help="test measurement CSV file(s)")
    p.add_argument("--train-2d", help="training CSV for per-height 2D CFM fits")
    p.add_argument("--pfl-mr", type=positive_float, help="effective robot mass for the PFL baseline (kg)")
    p.add_argument("--pfl-robot", choices=sorted(ROBOT_MOVING_MASS_KG), help="robot preset for the PFL baseline")
    p.add_argument("--k", type=positive_float, default=HAND_SPRING_CONSTANT_NPM, help="spring constant for PFL (N/m)")
    p.add_argument("--mh", type=mass_value, default="inf", help="human mass for PFL (kg) or 'inf'")
    p.add_argument("--max-force", type=positive_float, default=DEVICE_FORCE_LIMIT_N, help="discard samples above this force (N)")
    p.add_argument("--format", choices=["text", "csv"], default="text", help="output layout")
    p.add_argument("--workers", type=positive_int, default=MAX_WORKERS, help="threads for evaluation")
    add_out_argument(p)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("synth", help="synthetic measurements from a model")
    add_model_argument(p)
    add_grid_arguments(p, velocity=True)
    p.add_argument("--noise", type=non_negative_float, default=0.0, help="Gaussian force noise SD (N)")
    p.add_argument("--reps", type=positive_int, default=1, help="repetitions per state")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--label", help="dataset label (default: model label)")
    add_out_argument(p)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("contact", help="classify a force trace as transient or quasi-static")
    p.add_argument("--trace", required=True, help="CSV with columns time_s,force_n")
    p.add_argument("--window", type=positive_float, default=TRANSIENT_WINDOW_S, help="transient window after onset (s)")
    p.add_argument("--qs-limit", type=positive_float, default=FORCE_LIMIT_QUASI_STATIC_N, help="quasi-static force limit (N)")
    p.add_argument("--transient-limit", type=positive_float, default=FORCE_LIMIT_TRANSIENT_N, help="transient force limit (N)")
    p.add_argument("--onset-threshold", type=positive_float, default=ONSET_THRESHOLD_N, help="rise above the first sample marking onset (N)")
    p.add_argument("--noise-floor", type=non_negative_float, default=NOISE_FLOOR_N, help="force counted as released (N)")
    add_out_argument(p)
    p.set_defaults(handler=cmd_contact)

    p = sub.add_parser("recovery", help="Monte-Carlo check that the fit procedure recovers the published terms")
    p.add_argument("--seeds", type=positive_int, default=20, help="number of seeds")
    p.add_argument("--first-seed", type=int, default=0, help="first seed")
    p.add_argument("--noise", type=non_negative_float, default=1.12, help="Gaussian force noise SD (N)")
    p.add_argument("--reps", type=positive_int, default=3, help="repetitions per state")
    p.add_argument("--workers", type=positive_int, default=MAX_WORKERS, help="threads for candidate refits")
    p.add_argument("--no-progress", action="store_true", help="hide the progress bar")
    add_out_argument(p)
    p.set_defaults(handler=cmd_recovery)

    p = sub.add_parser("split", help="split a dataset into training-grid and testing samples")
    p.add_argument("--data", required=True, help="measurement CSV file")
    p.add_argument("--label", help="dataset label when the file holds several")
    add_grid_arguments(p, velocity=True)
    p.add_argument("--tolerance", type=non_negative_float, default=STATE_TOLERANCE, help="state matching tolerance (m, m/s)")
    p.add_argument("--out-train", required=True, help="training CSV to write")
    p.add_argument("--out-test", required=True, help="testing CSV to write")
    add_out_argument(p)
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("filter", help="drop samples above the measuring-device limit (equal is kept)")
    p.add_argument("--data", nargs="+", required=True, help="measurement CSV file(s)")
    p.add_argument("--max-force", type=positive_float, default=DEVICE_FORCE_LIMIT_N, help="cutoff force (N)")
    add_out_argument(p)
    p.set_defaults(handler=cmd_filter)

    return parser


def run(argv):
    """
    Parse argv and execute one subcommand.

    Returns 0 on success, 1 when the operation fails, 2 on usage errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (None, 0) else EXIT_USAGE

    configure_logging("DEBUG" if args.verbose else "WARNING", args.log_file)
    try:
        args.handler(args)
    except (CFMError, OSError) as e:
        logging.getLogger("debugger").debug(f"{args.command} failed", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return EXIT_FAILURE
    return EXIT_OK
