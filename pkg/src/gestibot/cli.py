"""Command-line surface: synth, train, eval, replay, serve.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
import time

from . import __version__
from .classifier import GestureNet, load_model_file, normalize_window, save_model_file
from .config import ConfigError, ServeConfig, load_config_file
from .datasets import read_dataset, write_dataset
from .evaluation import format_confusion, format_table, report_to_json, run_eval
from .frames import read_frames, write_frames
from .geometry import Workspace
from .gestures import GestureClass, parse_class
from .robot import RobotSim
from .serve import GestibotService
from .session import (
    MoveRequested,
    Session,
    SessionMode,
    StateChanged,
    StopRequested,
    WatchdogConfig,
    classifier_from_model,
)
from .synth import SynthParams, scenario, synth_dataset


class UsageError(Exception):
    """Bad flag combination that argparse cannot express itself."""


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse's default of 2 is reserved for runtime)
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gestibot",
                     description="Gesture-driven robot control toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[], help="generate datasets or replay files")
    p.add_argument("--out", required=True, help="output file path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.05, help="noise sigma in g")
    p.add_argument("--n-per-class", type=int, default=30)
    p.add_argument("--replay", action="store_true",
                   help="write a replay stream instead of a dataset")
    p.add_argument("--class", dest="gesture", default=None,
                   help="gesture class for --replay (e.g. XP, RZN)")
    p.add_argument("--peak", type=float, default=1.0, help="peak accel in g")
    p.add_argument("--rise", type=float, default=300.0, help="rise time in ms")
    p.add_argument("--hold-ms", type=float, default=10_000.0,
                   help="how long the left arm holds START")
    p.add_argument("--stop-tail-ms", type=float, default=100.0,
                   help="trailing operator STOP segment length")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a gesture network")
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--seed", type=int, required=True,
                   help="training seed (required for reproducibility)")
    p.add_argument("--lr", type=float, default=0.25)
    p.add_argument("--cycles", type=int, default=100_000)
    p.add_argument("--target-error", type=float, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on fresh synthetic trials")
    p.add_argument("--model", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1_000_003,
                   help="eval seed (keep disjoint from the training seed)")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--report", default=None,
                   help="write the machine-readable report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("replay", help="drive a session+robot from a frame file")
    p.add_argument("--file", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--speed", type=float, default=1.0,
                   help="clock multiplier; 0 runs as fast as possible")
    p.add_argument("--r-int", type=float, default=None)
    p.add_argument("--r-ext", type=float, default=None)
    p.add_argument("--lin-speed", type=float, default=None)
    p.add_argument("--rot-speed", type=float, default=None)
    p.add_argument("--watchdog-ms", type=float, default=200.0)
    p.add_argument("--tick-hz", type=float, default=100.0)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the live control service")
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--model", default=None, help="model file (overrides config)")
    p.add_argument("--host", default=None)
    p.add_argument("--client-port", type=int, default=None)
    p.add_argument("--robot-port", type=int, default=None)
    p.add_argument("--watchdog-ms", type=float, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def cmd_synth(args) -> int:
    params = SynthParams(
        peak_accel=args.peak,
        rise_time_ms=args.rise,
        noise_sigma=args.noise,
        seed=args.seed,
    )
    if args.replay:
        if not args.gesture:
            raise UsageError("--replay requires --class")
        try:
            cls = parse_class(args.gesture)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if cls is GestureClass.UNKNOWN:
            raise UsageError("cannot synthesize UNKNOWN")
        samples = scenario(cls, params, hold_ms=args.hold_ms,
                           stop_tail_ms=args.stop_tail_ms)
        write_frames(args.out, samples)
        print(f"wrote {len(samples)} frames ({cls.name}) to {args.out}")
        return 0
    windows, labels = synth_dataset(args.n_per_class, params)
    write_dataset(args.out, windows, labels)
    print(f"wrote {len(labels)} examples "
          f"({args.n_per_class} per class) to {args.out}")
    return 0


def cmd_train(args) -> int:
    windows, labels = read_dataset(args.data)
    net = GestureNet(
        learning_rate=args.lr,
        cycles=args.cycles,
        seed=args.seed,
        target_error=args.target_error,
    )
    net.fit(normalize_window(windows), labels)
    save_model_file(args.out, net.model_)
    report = net.report_
    print(f"trained on {len(labels)} examples: "
          f"{report.cycles_run} presentations in {report.epochs_run} epochs, "
          f"{report.duration_s:.1f} s")
    print(f"final mean squared error: {report.final_error:.6f}")
    if report.missing_classes:
        print("warning: classes missing from the dataset: "
              + ", ".join(report.missing_classes))
    print("training-set accuracy per class:")
    for name, acc in report.per_class_accuracy.items():
        print(f"  {name:<4s} {100.0 * acc:5.1f}%")
    print(f"model written to {args.out}")
    return 0


def cmd_eval(args) -> int:
    model = load_model_file(args.model)
    params = SynthParams(noise_sigma=args.noise, seed=args.seed)
    report = run_eval(model, trials_per_class=args.trials, params=params)
    print(format_table(report))
    print()
    print(format_confusion(report))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report_to_json(report))
        print(f"\nreport written to {args.report}")
    return 0


def _format_event(event) -> str:
    if isinstance(event, MoveRequested):
        inc = ", ".join(f"{v:.1f}" for v in event.increment)
        return f"[{event.t:9.1f} ms] MOVE  {event.gesture.name} inc=({inc})"
    if isinstance(event, StopRequested):
        return f"[{event.t:9.1f} ms] STOP  {event.reason.value}"
    return f"[{event.t:9.1f} ms] MODE  {event.mode.name}"


def cmd_replay(args) -> int:
    samples, skipped = read_frames(args.file, strict=False)
    if skipped:
        print(f"skipped {skipped} malformed frame(s)", file=sys.stderr)
    if not samples:
        raise ConfigError("replay file contains no frames")

    ws_kwargs = {}
    if args.r_int is not None:
        ws_kwargs["r_int"] = args.r_int
    if args.r_ext is not None:
        ws_kwargs["r_ext"] = args.r_ext
    workspace = Workspace(**ws_kwargs)
    sim_kwargs = {}
    if args.lin_speed is not None:
        sim_kwargs["lin_speed"] = args.lin_speed
    if args.rot_speed is not None:
        sim_kwargs["rot_speed"] = args.rot_speed
    sim = RobotSim(workspace, **sim_kwargs)
    model = load_model_file(args.model)
    session = Session(
        classifier_from_model(model),
        workspace,
        lambda: sim.pose,
        watchdog=WatchdogConfig(args.watchdog_ms),
    )

    tick_ms = 1000.0 / args.tick_hz
    next_tick = tick_ms
    virtual_now = 0.0

    def handle(events) -> None:
        for event in events:
            print(_format_event(event))
            if isinstance(event, MoveRequested):
                reply = sim.imov(list(event.increment))
                if not reply.get("ok"):
                    print(f"  robot rejected move: {reply.get('err')}")
            elif isinstance(event, StopRequested):
                sim.stop(event.reason.value)

    def advance_to(t: float) -> None:
        nonlocal next_tick, virtual_now
        while next_tick <= t:
            sim.tick(tick_ms / 1000.0)
            handle(session.watchdog_tick(next_tick))
            next_tick += tick_ms
        virtual_now = t

    prev_t = samples[0].t
    for sample in samples:
        if args.speed > 0 and sample.t > prev_t:
            time.sleep((sample.t - prev_t) / 1000.0 / args.speed)
        prev_t = sample.t
        advance_to(sample.t)
        handle(session.ingest(sample))

    # run on until the system quiesces so in-flight moves land
    horizon = virtual_now + 60_000.0
    while (sim.moving or session.mode is not SessionMode.IDLE) and next_tick <= horizon:
        if args.speed > 0:
            time.sleep(tick_ms / 1000.0 / args.speed)
        sim.tick(tick_ms / 1000.0)
        handle(session.watchdog_tick(next_tick))
        next_tick += tick_ms

    pose = sim.pose
    print(f"dropped samples: {session.dropped_samples}")
    print(f"final pose: xyz=({pose.position[0]:.1f}, {pose.position[1]:.1f}, "
          f"{pose.position[2]:.1f}) rpy=({pose.rotation[0]:.1f}, "
          f"{pose.rotation[1]:.1f}, {pose.rotation[2]:.1f})")
    return 0


def cmd_serve(args) -> int:
    mapping = load_config_file(args.config) if args.config else {}
    cfg = ServeConfig.from_mapping(
        mapping,
        model_path=args.model,
        host=args.host,
        client_port=args.client_port,
        robot_port=args.robot_port,
        watchdog_timeout_ms=args.watchdog_ms,
    )
    if not cfg.model_path:
        raise ConfigError("a model is required (--model or model_path=...)")

    async def run() -> None:
        service = GestibotService(cfg)
        await service.start()
        # flush so supervisors reading a pipe see the ports immediately
        print(f"client socket: ws://{cfg.host}:{service.client_port}/", flush=True)
        print(f"robot protocol: tcp://{cfg.host}:{service.robot_port}", flush=True)
        try:
            await service.run_forever()
        finally:
            await service.stop()

    try:
        asyncio.run(run())
    except KeyboardInterrupt:
        print("interrupted, shutting down")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gestibot: error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception as exc:
        print(f"gestibot: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
