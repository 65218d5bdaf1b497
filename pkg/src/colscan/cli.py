"""Command-line entry points: run, replay, serve."""

from __future__ import annotations

import argparse
import sys

from .config import parse_cli_overrides
from .runner import PilotScript, read_report, replay_verify, run_headless, write_report


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="detector noise seed")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="GROUP.FIELD=VALUE",
        help="parameter override, e.g. mission.area_threshold=0.12",
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="colscan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="headless scenario run, writes a report")
    run_p.add_argument("--scenario", required=True)
    run_p.add_argument("--pilot", help="pilot script JSON file")
    run_p.add_argument("--dt", type=float, default=None, help="step size override, seconds")
    run_p.add_argument("--out", default=None, help="report output path")
    _add_common(run_p)

    replay_p = sub.add_parser("replay", help="re-run a report's recorded inputs")
    replay_p.add_argument("--report", required=True)
    replay_p.add_argument(
        "--verify", action="store_true", help="compare the rerun against the report"
    )

    serve_p = sub.add_parser("serve", help="live telemetry/pilot service")
    serve_p.add_argument("--scenario", required=True)
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument("--rate", type=float, default=1.0, help="real-time multiplier (0 = unthrottled)")
    serve_p.add_argument("--out", default=None, help="write the session report here on end")
    _add_common(serve_p)

    args = parser.parse_args(argv)

    if args.command == "run":
        overrides = parse_cli_overrides(args.overrides)
        pilot = PilotScript.load(args.pilot) if args.pilot else None
        report = run_headless(
            args.scenario, pilot_script=pilot, seed=args.seed, overrides=overrides, dt=args.dt
        )
        out = args.out or "report.json"
        write_report(report, out)
        print(
            f"{report.scenario_name}: {report.termination} after {report.ticks} ticks, "
            f"{len(report.captures)} captures, report -> {out}"
        )
        for a in report.assessments:
            print(
                f"  column {a['column_id']}: {a['fused_state']} "
                f"(coverage {a['coverage_fraction']:.1%})"
            )
        return 0

    if args.command == "replay":
        if args.verify:
            ok, msg = replay_verify(args.report)
            print(("PASS: " if ok else "FAIL: ") + msg)
            return 0 if ok else 1
        report = read_report(args.report)
        print(
            f"{report.scenario_name}: {report.termination} after {report.ticks} ticks, "
            f"{len(report.captures)} captures"
        )
        return 0

    if args.command == "serve":
        from .server import serve

        overrides = parse_cli_overrides(args.overrides)
        server = serve(
            args.scenario, port=args.port, rate=args.rate, seed=args.seed, overrides=overrides
        )
        print(
            f"serving {args.scenario} on ws://127.0.0.1:{server.port} (rate {args.rate}x)",
            flush=True,
        )
        try:
            report = server.wait()
        except KeyboardInterrupt:
            server.stop()
            report = server.report
        if report is not None and args.out:
            write_report(report, args.out)
            print(f"session report -> {args.out}")
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
