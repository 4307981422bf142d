"""
Command line front-end for the SWIPT simulator.

Subcommands: ``run``, ``compare``, ``trace``, ``select``, ``oracle-check``,
``solve``, ``serve`` and ``report``. Exit status is 0 on success, 1 on solver
failures or oracle violations and 2 on configuration errors.
"""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, TextIO

from swipt.antenna_selection import STRATEGIES
from swipt.channel import EigenChannels, eigen_channels, load_channel
from swipt.errors import ConfigError, SwiptError
from swipt.solvers import InnerSolverFactory
from swipt.system_model import screen_parameters
from harness.controller import OracleCheckRecord, SimulationController, trial_channel
from util.api_client import APIClientFactory
from util.config_manager import ConfigurationManager, RunConfig
from util.report_generator import write_report
from util.trace_formatter import TraceFormatterFactory, TraceStatistics, format_records, format_selection_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swipt", description="EE optimisation for SWIPT MIMO links")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("--env-file", default=None, help="dotenv file to read instead of ./.env")
    commands = parser.add_subparsers(dest="command", required=True)

    def with_config(sub):
        sub.add_argument("--config", default=None, help="run configuration JSON (default: default_params.json)")
        sub.add_argument("--seed", type=int, default=None, help="override master_seed")
        sub.add_argument("--workers", type=int, default=None, help="override SWIPT_WORKERS")
        return sub

    for name, text in (("run", "run every trial and write TrialRecord CSV"),
                       ("compare", "paired per-trial comparison CSV with baselines")):
        sub = with_config(commands.add_parser(name, help=text))
        sub.add_argument("--out", default=None, help="CSV path (default: stdout)")
        sub.add_argument("--timings", action="store_true", help="include the runtime_ms column")

    sub = with_config(commands.add_parser("trace", help="convergence trace of one trial"))
    sub.add_argument("--trial", type=int, default=0)
    sub.add_argument("--algo", default="jeapa", choices=InnerSolverFactory.available())
    sub.add_argument("--out", default=None)

    sub = with_config(commands.add_parser("select", help="per-N antenna selection table of one trial"))
    sub.add_argument("--trial", type=int, default=0)
    sub.add_argument("--strategy", default="frobenius", choices=STRATEGIES)
    sub.add_argument("--algo", default="jeapa", choices=InnerSolverFactory.available())
    sub.add_argument("--out", default=None)
    sub.add_argument("--remote", action="store_true", help="send the trial channel to the solver service")

    sub = with_config(commands.add_parser("oracle-check", help="certify solvers against the grid oracle"))
    sub.add_argument("--out", default=None, help="optional CSV of per-trial checks")

    sub = with_config(commands.add_parser("solve", help="solve one instance"))
    source = sub.add_mutually_exclusive_group(required=True)
    source.add_argument("--gains", help="comma-separated eigen-channel gains")
    source.add_argument("--channel", help="channel file written by save_channel")
    sub.add_argument("--algo", default="jeapa", choices=InnerSolverFactory.available())
    sub.add_argument("--remote", action="store_true", help="send the instance to the solver service")

    sub = commands.add_parser("serve", help="start the HTTP solver service")
    sub.add_argument("--host", default="localhost")
    sub.add_argument("--port", type=int, default=8000)

    sub = commands.add_parser("report", help="PDF summary of a run CSV")
    sub.add_argument("--csv", required=True)
    sub.add_argument("--out", required=True)
    sub.add_argument("--title", default="EE simulation summary")
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
        logger.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _oracle_summary(records: List[OracleCheckRecord], stream: TextIO) -> int:
    """Print the oracle check summary and return the number of violations."""
    failures = [r for r in records if not r.passed]
    gaps = [r.oracle_ee - r.rounded_ee for r in records
            if r.oracle_ee is not None and r.rounded_ee is not None]
    mean_gap = sum(gaps) / len(gaps) if gaps else float("nan")
    print(f"oracle check: {len(records)} checks, {len(failures)} violations, "
          f"mean rounded gap {mean_gap:.6g}", file=stream)
    for record in failures:
        print(f"  trial {record.trial} {record.algorithm}: oracle={record.oracle_ee} "
              f"relaxed={record.relaxed_ee} rounded={record.rounded_ee}", file=stream)
    return len(failures)


class CommandLineApp:
    """Dispatches parsed arguments to the simulation controller and the service."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config_manager = ConfigurationManager.from_env_file(args.env_file)
        environment = self.config_manager.get_environment()
        level = {0: environment.log_level, 1: "INFO"}.get(args.verbose, "DEBUG")
        ConfigurationManager.configure_logging(level)

    def _config(self) -> RunConfig:
        return self.config_manager.get_run_config(self.args.config, self.args.seed)

    def _controller(self, config: RunConfig) -> SimulationController:
        workers = self.args.workers or self.config_manager.get_environment().workers
        return SimulationController(config, workers)

    def _exclude(self):
        return () if self.args.timings else ("runtime_ms",)

    def cmd_run(self) -> int:
        config = self._config()
        controller = self._controller(config)
        records = controller.run()
        _emit(format_records(records, exclude=self._exclude()), self.args.out)
        if config.oracle_check and _oracle_summary(controller.oracle_check(), sys.stderr):
            return EXIT_FAILURE
        return EXIT_OK

    def cmd_compare(self) -> int:
        comparisons = self._controller(self._config()).compare()
        _emit(format_records(comparisons), self.args.out)
        return EXIT_OK

    def cmd_trace(self) -> int:
        result = self._controller(self._config()).trace(self.args.trial, self.args.algo)
        _emit(TraceFormatterFactory.create_formatter(self.args.algo).format_trace(result), self.args.out)
        stats = TraceStatistics(result).get_statistics()
        print(", ".join(f"{key}={value}" for key, value in stats.items()), file=sys.stderr)
        return EXIT_OK

    def cmd_oracle_check(self) -> int:
        records = self._controller(self._config()).oracle_check()
        if self.args.out:
            _emit(format_records(records), self.args.out)
        return EXIT_FAILURE if _oracle_summary(records, sys.stdout) else EXIT_OK

    def cmd_select(self) -> int:
        config = self._config()
        if not self.args.remote:
            outcome = self._controller(config).select(self.args.trial, self.args.strategy, self.args.algo)
            _emit(format_selection_table(outcome), self.args.out)
            return EXIT_OK
        if not 0 <= self.args.trial < config.trials:
            raise ConfigError(f"trial {self.args.trial} outside [0, {config.trials})", field="trial")
        h = trial_channel(config, self.args.trial)
        body = {
            "channel": {"real": h.entries.real.tolist(), "imag": h.entries.imag.tolist()},
            "params": dataclasses.asdict(config.params),
            "qos": dataclasses.asdict(config.qos),
            "strategy": self.args.strategy,
            "algorithm": self.args.algo,
            "solver_cfg": dataclasses.asdict(config.solver_cfg),
            "max_exhaustive_antennas": config.max_exhaustive_antennas,
        }
        client = self._client()
        payload = None if client is None else client.select(body)
        if payload is None:
            return EXIT_FAILURE
        _emit(json.dumps(payload, indent=2) + "\n", self.args.out)
        return EXIT_OK

    def cmd_solve(self) -> int:
        from app import result_payload

        config = self._config()
        params = config.params
        if self.args.channel:
            h = load_channel(self.args.channel)
            params = params.with_updates(n_rx=h.n_rx, n_tx=h.n_tx)
            lam, channel, gains, n_active = eigen_channels(h), h, None, h.n_rx
        else:
            try:
                gains = [float(g) for g in self.args.gains.split(",")]
            except ValueError:
                raise ConfigError(f"--gains must be comma-separated numbers, got {self.args.gains!r}",
                                  field="gains") from None
            lam, channel, n_active = EigenChannels.from_gains(gains), None, params.n_rx
        if self.args.remote:
            payload = self._solve_remote(config, params, gains, channel)
            if payload is None:
                return EXIT_FAILURE
        else:
            screen_parameters(params, lam)
            solver = InnerSolverFactory.create_solver(self.args.algo, config.solver_cfg)
            payload = result_payload(solver.solve(lam, params, config.qos, n_active))
        print(json.dumps(payload, indent=2))
        return EXIT_OK

    def _client(self):
        environment = self.config_manager.get_environment()
        client = APIClientFactory.create_client("solver", environment.service_url, environment.request_timeout)
        if not client.check_server_status():
            logger.error("solver service at %s is not reachable", environment.service_url)
            return None
        return client

    def _solve_remote(self, config: RunConfig, params, gains, channel):
        client = self._client()
        if client is None:
            return None
        body = {
            "params": dataclasses.asdict(params),
            "qos": dataclasses.asdict(config.qos),
            "algorithm": self.args.algo,
            "solver_cfg": dataclasses.asdict(config.solver_cfg),
        }
        if channel is not None:
            body["channel"] = {"real": channel.entries.real.tolist(), "imag": channel.entries.imag.tolist()}
        else:
            body["gains"] = gains
        return client.solve(body)

    def cmd_serve(self) -> int:
        from app import SwiptSolverAPIApp

        SwiptSolverAPIApp().run(self.args.host, self.args.port)
        return EXIT_OK

    def cmd_report(self) -> int:
        path, size = write_report(self.args.csv, self.args.out, self.args.title)
        print(f"wrote {path} ({size} bytes)")
        return EXIT_OK

    def run(self) -> int:
        handler = getattr(self, "cmd_" + self.args.command.replace("-", "_"))
        try:
            return handler()
        except ConfigError as exc:
            logger.error("configuration error: %s", exc)
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (SwiptError, ArithmeticError, ValueError, OSError) as exc:
            logger.error("%s failed: %s", self.args.command, exc)
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for the simulator CLI."""
    args = build_parser().parse_args(argv)
    try:
        app = CommandLineApp(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return app.run()


if __name__ == "__main__":
    sys.exit(main())
