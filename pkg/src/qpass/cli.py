"""Command-line interface and pipeline orchestration.

stdout carries only the manifest path; diagnostics go to stderr.
Exit codes: 0 success, 2 configuration error, 3 input parse/validation
error, 4 numerical failure, 1 unexpected error.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import events as ev
from . import metric, render, synth
from .fieldvalue import (SingularSystemError, TransitionError, ValuationConfig,
                         ValuationError, export_field_values_csv,
                         run_team_valuation)
from .metric import DEFAULT_MIN_PASSES
from .partition import ClusteringError, PartitionConfig, export_partition_csv, \
    export_scaler_csv, build_partition

log = logging.getLogger("qpass")

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4

TOP_PASS_COUNT = 30  # passes per trajectory figure
TOP_PLAYERS_PLOTTED = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    events: Optional[Path] = None
    roster: Optional[Path] = None
    out: Path = Path("qpass-out")
    team: Optional[str] = None
    s: float = 0.7
    cmax: int = 1000
    cmin: int = 100
    cstep: int = 50
    seed: int = 0
    min_passes: int = DEFAULT_MIN_PASSES
    reports: bool = True

    def valuation_config(self) -> ValuationConfig:
        try:
            return ValuationConfig(
                s=self.s,
                partition=PartitionConfig(c_max=self.cmax, c_min=self.cmin,
                                          c_step=self.cstep, seed=self.seed))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def require(self, *names: str) -> None:
        for name in names:
            path = getattr(self, name)
            if path is None:
                raise ConfigError(f"--{name} is required for this command")
            if not Path(path).is_file():
                raise ConfigError(f"--{name} path does not exist: {path}")


def load_config_file(path: Path) -> dict[str, str]:
    """Flat key=value file; blank lines and #-comments ignored."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


class OutputDir:
    """Collects written files and finishes with a sha256 manifest."""

    def __init__(self, root: Path):
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        self.entries: dict[str, str] = {}

    def write(self, relpath: str, content: str) -> Path:
        path = self.root / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        data = content.encode()
        path.write_bytes(data)
        self.entries[relpath] = hashlib.sha256(data).hexdigest()
        return path

    def finish(self) -> Path:
        lines = [f"{rel} {digest}" for rel, digest in sorted(self.entries.items())]
        manifest = self.root / "manifest.txt"
        manifest.write_text("\n".join(lines) + "\n")
        return manifest


def _load_inputs(cfg: RunConfig, need_roster: bool = True):
    cfg.require("events", *(["roster"] if need_roster else []))
    with open(cfg.events, newline="") as fh:
        logs = ev.parse_events(fh)
    roster = None
    if need_roster:
        with open(cfg.roster, newline="") as fh:
            roster = ev.parse_roster(fh)
    return logs, roster


def _teams(cfg: RunConfig, logs) -> list[str]:
    teams = ev.all_team_ids(logs)
    if cfg.team is not None:
        if cfg.team not in teams:
            raise ConfigError(f"team {cfg.team!r} not present in the event file")
        return [cfg.team]
    return teams


def _run_valuations(cfg: RunConfig, logs, teams):
    vcfg = cfg.valuation_config()
    out = {}
    for team in teams:
        team_events = ev.build_team_event_sets(logs, team)
        log.info("valuing team %s (%d own passes)", team, len(team_events.own_passes))
        out[team] = (team_events, run_team_valuation(team_events, vcfg))
    return out


def _score_all(valuations):
    records = []
    for team, (team_events, valuation) in valuations.items():
        records.extend(metric.score_team_passes(
            valuation.result, team_events.own_passes, valuation.field_values))
    return records


def cmd_synth(cfg: RunConfig, args) -> Path:
    spec = synth.SyntheticLeagueSpec(
        n_teams=args.teams, matches_per_pairing=args.rounds,
        possessions_per_match=args.possessions, seed=cfg.seed)
    event_csv, roster_csv = synth.generate_synthetic_league(spec)
    out = OutputDir(cfg.out)
    out.write("events.csv", event_csv)
    out.write("roster.csv", roster_csv)
    return out.finish()


def cmd_ingest(cfg: RunConfig, args) -> Path:
    logs, _ = _load_inputs(cfg, need_roster=False)
    logs = ev.augment(logs)
    n_passes = sum(isinstance(e, ev.PassRecord) for lg in logs for e in lg.events)
    n_virtual = sum(isinstance(e, ev.PassRecord) and e.virtual
                    for lg in logs for e in lg.events)
    n_shots = sum(isinstance(e, ev.ShotRecord) for lg in logs for e in lg.events)
    log.info("%d matches, %d passes (%d virtual), %d shots",
             len(logs), n_passes, n_virtual, n_shots)
    out = OutputDir(cfg.out)
    out.write("events_augmented.csv", ev.serialize_events(logs))
    return out.finish()


def cmd_partition(cfg: RunConfig, args) -> Path:
    logs, _ = _load_inputs(cfg, need_roster=False)
    logs = ev.augment(logs)
    out = OutputDir(cfg.out)
    pcfg = PartitionConfig(c_max=cfg.cmin, c_min=cfg.cmin, c_step=cfg.cstep,
                           seed=cfg.seed)
    for team in _teams(cfg, logs):
        team_events = ev.build_team_event_sets(logs, team)
        result = build_partition(team_events, None, cfg.cmin, pcfg)
        for side in ("own", "opp"):
            out.write(f"{team}/partition_{side}.csv",
                      export_partition_csv(result.partition, side))
            out.write(f"{team}/partition_{side}_scaler.csv",
                      export_scaler_csv(result.partition, side))
    return out.finish()


def cmd_value(cfg: RunConfig, args) -> Path:
    logs, _ = _load_inputs(cfg, need_roster=False)
    logs = ev.augment(logs)
    valuations = _run_valuations(cfg, logs, _teams(cfg, logs))
    out = OutputDir(cfg.out)
    for team, (_, valuation) in valuations.items():
        out.write(f"{team}/field_values.csv",
                  export_field_values_csv(valuation.field_values))
        for side in ("own", "opp"):
            out.write(f"{team}/partition_{side}.csv",
                      export_partition_csv(valuation.partition, side))
            out.write(f"{team}/partition_{side}_scaler.csv",
                      export_scaler_csv(valuation.partition, side))
    return out.finish()


def cmd_score(cfg: RunConfig, args) -> Path:
    logs, _ = _load_inputs(cfg, need_roster=False)
    logs = ev.augment(logs)
    valuations = _run_valuations(cfg, logs, _teams(cfg, logs))
    out = OutputDir(cfg.out)
    for team, (team_events, valuation) in valuations.items():
        records = metric.score_team_passes(
            valuation.result, team_events.own_passes, valuation.field_values)
        lines = ["match_id,seq,player_id,successful,virtual,qpass,f_s,f_e,l_e_value"]
        for r in records:
            p = r.pass_ref
            le = "" if r.l_e_value is None else f"{r.l_e_value:.9f}"
            lines.append(f"{p.match_id},{p.seq},{p.player_id},"
                         f"{int(p.successful)},{int(p.virtual)},"
                         f"{r.qpass:.9f},{r.f_s:.9f},{r.f_e:.9f},{le}")
        out.write(f"{team}/qpass.csv", "\n".join(lines) + "\n")
    return out.finish()


def cmd_rank(cfg: RunConfig, args) -> Path:
    logs, roster = _load_inputs(cfg)
    logs = ev.augment(logs)
    valuations = _run_valuations(cfg, logs, _teams(cfg, logs))
    records = _score_all(valuations)
    rankings = metric.rank_players(records, roster, cfg.min_passes)
    out = OutputDir(cfg.out)
    out.write("rankings.csv", metric.export_rankings_csv(rankings, roster))
    return out.finish()


def _write_reports(out: OutputDir, valuations, roster, cfg: RunConfig) -> None:
    records = _score_all(valuations)
    rankings = metric.rank_players(records, roster, cfg.min_passes)
    out.write("rankings.csv", metric.export_rankings_csv(rankings, roster))

    for team, (_, valuation) in valuations.items():
        out.write(f"{team}/field_values.csv",
                  export_field_values_csv(valuation.field_values))
        out.write(f"{team}/partition_map.svg",
                  render.render_partition_map(valuation.partition))
        out.write(f"{team}/value_heatmap_own.svg",
                  render.render_value_heatmap(valuation.partition,
                                              valuation.field_values, "own"))
        out.write(f"{team}/value_heatmap_opp.svg",
                  render.render_value_heatmap(valuation.partition,
                                              valuation.field_values, "opp"))

    cdfs = metric.unsuccessful_cdf(records, roster)
    if cdfs:
        out.write("unsuccessful_cdf.csv", metric.export_cdf_csv(cdfs))
        out.write("unsuccessful_cdf.svg", render.render_cdf(cdfs))

    for ranking in rankings[:TOP_PLAYERS_PLOTTED]:
        top = metric.top_passes(records, ranking.player_id, TOP_PASS_COUNT)
        out.write(f"top_passes_{ranking.player_id}.svg",
                  render.render_pass_trajectories(top))


def cmd_report(cfg: RunConfig, args) -> Path:
    logs, roster = _load_inputs(cfg)
    logs = ev.augment(logs)
    valuations = _run_valuations(cfg, logs, _teams(cfg, logs))
    out = OutputDir(cfg.out)
    _write_reports(out, valuations, roster, cfg)
    return out.finish()


def cmd_all(cfg: RunConfig, args) -> Path:
    logs, roster = _load_inputs(cfg)
    logs = ev.augment(logs)
    valuations = _run_valuations(cfg, logs, _teams(cfg, logs))
    out = OutputDir(cfg.out)
    out.write("events_augmented.csv", ev.serialize_events(logs))
    if cfg.reports:
        _write_reports(out, valuations, roster, cfg)
    return out.finish()


COMMANDS = {
    "ingest": cmd_ingest,
    "partition": cmd_partition,
    "value": cmd_value,
    "score": cmd_score,
    "rank": cmd_rank,
    "report": cmd_report,
    "synth": cmd_synth,
    "all": cmd_all,
}

_CONFIG_FIELDS = {
    "events": Path, "roster": Path, "out": Path, "team": str, "s": float,
    "cmax": int, "cmin": int, "cstep": int, "seed": int, "min_passes": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpass",
        description="Team-specific field values and intrinsic pass quality")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key=value config file")
        p.add_argument("--events", type=Path)
        p.add_argument("--roster", type=Path)
        p.add_argument("--out", type=Path)
        p.add_argument("--team", type=str)
        p.add_argument("--s", type=float)
        p.add_argument("--cmax", type=int)
        p.add_argument("--cmin", type=int)
        p.add_argument("--cstep", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--min-passes", dest="min_passes", type=int)
        p.add_argument("--no-reports", dest="reports", action="store_false",
                       default=None)
        if name == "synth":
            p.add_argument("--teams", type=int, default=4)
            p.add_argument("--rounds", type=int, default=1)
            p.add_argument("--possessions", type=int, default=150)
    return parser


def make_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        if not args.config.is_file():
            raise ConfigError(f"config file not found: {args.config}")
        for key, raw in load_config_file(args.config).items():
            if key == "reports":
                cfg.reports = raw.lower() in ("1", "true", "yes")
                continue
            if key not in _CONFIG_FIELDS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                setattr(cfg, key, _CONFIG_FIELDS[key](raw))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    for key in (*_CONFIG_FIELDS, "reports"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    # rebind the handler to the current sys.stderr on every invocation so
    # repeated in-process calls (tests, embedding) log to the right stream
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = make_run_config(args)
        manifest = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (ev.EventParseError, ev.ValidationError) as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except (ClusteringError, TransitionError, SingularSystemError,
            ValuationError, metric.ScoringError) as exc:
        log.error("numerical error: %s", exc)
        return EXIT_NUMERIC
    except Exception:  # noqa: BLE001
        log.exception("unexpected error")
        return EXIT_UNEXPECTED
    print(manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
