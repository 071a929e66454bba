"""Event data model: parsing, possession segmentation, virtual passes.

Coordinates live on a [0,100] x [0,100] pitch, each team attacking
left-to-right in its own frame (the source convention). Turnover
locations are converted between frames with :func:`mirror`.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

log = logging.getLogger(__name__)

POSITIONS = ("GK", "DF", "MF", "FW")

EVENT_HEADER = [
    "match_id", "seq", "team_id", "player_id", "kind",
    "x_start", "y_start", "x_end", "y_end", "flag", "assist_seq",
]
ROSTER_HEADER = ["player_id", "name", "team_id", "position"]


class EventParseError(ValueError):
    """Malformed row in an event or roster file."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ValueError):
    """Structurally valid input that violates a log-level contract."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float


def clamp_point(x: float, y: float) -> Point:
    """Clamp raw feed coordinates into the pitch frame (throw-ins etc.
    can land slightly outside)."""
    return Point(min(max(x, 0.0), 100.0), min(max(y, 0.0), 100.0))


def mirror(p: Point) -> Point:
    """Flip a point into the other team's attack frame."""
    return Point(100.0 - p.x, 100.0 - p.y)


@dataclass
class PassRecord:
    match_id: str
    seq: int
    team_id: str
    player_id: str
    start: Point
    end: Point
    successful: bool
    virtual: bool = False
    possession_id: Optional[str] = None
    is_last_of_possession: bool = False
    # set during segmentation when the possession terminates in a shot;
    # such passes do not generate a possession-change transition
    possession_ends_with_shot: bool = False
    assist_for_shot: Optional[int] = None  # seq of the assisted shot


@dataclass
class ShotRecord:
    match_id: str
    seq: int
    team_id: str
    player_id: str
    location: Point
    is_goal: bool
    assisted_by: Optional[int] = None  # seq of the assisting pass


Event = Union[PassRecord, ShotRecord]


@dataclass
class MatchEventLog:
    match_id: str
    teams: tuple[str, str]
    events: list[Event] = field(default_factory=list)


@dataclass
class TeamEventSet:
    """Season-level event sets for one team: its own passes/shots and
    the pooled passes/shots of all its opponents, each in the acting
    team's own attack frame."""

    team_id: str
    own_passes: list[PassRecord]
    opponent_passes: list[PassRecord]
    own_shots: list[ShotRecord]
    opponent_shots: list[ShotRecord]


@dataclass(frozen=True)
class PlayerInfo:
    player_id: str
    name: str
    team_id: str
    position: str  # one of POSITIONS


def _parse_float(text: str, what: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise EventParseError(f"bad {what} value {text!r}", line) from None


def _parse_row(row: list[str], line: int) -> Event:
    if len(row) < 10:
        raise EventParseError(f"expected at least 10 columns, got {len(row)}", line)
    match_id, seq_s, team_id, player_id, kind = (c.strip() for c in row[:5])
    try:
        seq = int(seq_s)
    except ValueError:
        raise EventParseError(f"bad seq {seq_s!r}", line) from None
    flag = row[9].strip()
    if flag not in ("0", "1"):
        raise EventParseError(f"bad flag {flag!r}", line)
    assist = row[10].strip() if len(row) > 10 else ""
    assist_seq: Optional[int] = None
    if assist:
        try:
            assist_seq = int(assist)
        except ValueError:
            raise EventParseError(f"bad assist_seq {assist!r}", line) from None

    x_s = _parse_float(row[5], "x_start", line)
    y_s = _parse_float(row[6], "y_start", line)
    start = clamp_point(x_s, y_s)

    if kind in ("pass", "virtual_pass"):
        x_e = _parse_float(row[7], "x_end", line)
        y_e = _parse_float(row[8], "y_end", line)
        return PassRecord(
            match_id=match_id, seq=seq, team_id=team_id, player_id=player_id,
            start=start, end=clamp_point(x_e, y_e), successful=flag == "1",
            virtual=kind == "virtual_pass",
        )
    if kind == "shot":
        if row[7].strip() or row[8].strip():
            raise EventParseError("shot rows must leave x_end/y_end empty", line)
        return ShotRecord(
            match_id=match_id, seq=seq, team_id=team_id, player_id=player_id,
            location=start, is_goal=flag == "1", assisted_by=assist_seq,
        )
    raise EventParseError(f"unknown event kind {kind!r}", line)


def parse_events(source: Union[str, Iterable[str]]) -> list[MatchEventLog]:
    """Parse an event CSV (possibly covering many matches) into ordered
    per-match logs. Coordinates are clamped to the pitch frame."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty event file") from None
    if [c.strip() for c in header[:10]] != EVENT_HEADER[:10]:
        raise EventParseError(f"unexpected header {header!r}", 1)

    by_match: dict[str, list[Event]] = {}
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        ev = _parse_row(row, line_no)
        by_match.setdefault(ev.match_id, []).append(ev)

    if not by_match:
        raise ValidationError("event file contains no events")

    logs = []
    for match_id, events in by_match.items():
        seqs = [e.seq for e in events]
        if any(b <= a for a, b in zip(seqs, seqs[1:])):
            raise ValidationError(f"match {match_id}: seq values not strictly increasing")
        teams = sorted({e.team_id for e in events})
        if len(teams) != 2:
            raise ValidationError(
                f"match {match_id}: expected exactly 2 teams, found {len(teams)}")
        _link_assists(match_id, events)
        logs.append(MatchEventLog(match_id=match_id, teams=(teams[0], teams[1]),
                                  events=events))
    return logs


def _link_assists(match_id: str, events: list[Event]) -> None:
    passes = {e.seq: e for e in events if isinstance(e, PassRecord)}
    for ev in events:
        if isinstance(ev, ShotRecord) and ev.assisted_by is not None:
            p = passes.get(ev.assisted_by)
            if p is None:
                raise ValidationError(
                    f"match {match_id}: shot seq {ev.seq} references unknown "
                    f"assist pass seq {ev.assisted_by}")
            if p.team_id != ev.team_id:
                raise ValidationError(
                    f"match {match_id}: assist pass {p.seq} and shot {ev.seq} "
                    f"belong to different teams")
            p.assist_for_shot = ev.seq


def serialize_events(logs: list[MatchEventLog]) -> str:
    """Inverse of parse_events; virtual passes are written with kind
    'virtual_pass' so augmented logs also round-trip."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVENT_HEADER)
    for log_ in logs:
        for ev in log_.events:
            if isinstance(ev, PassRecord):
                kind = "virtual_pass" if ev.virtual else "pass"
                w.writerow([
                    ev.match_id, ev.seq, ev.team_id, ev.player_id, kind,
                    _fmt(ev.start.x), _fmt(ev.start.y),
                    _fmt(ev.end.x), _fmt(ev.end.y),
                    int(ev.successful), "",
                ])
            else:
                w.writerow([
                    ev.match_id, ev.seq, ev.team_id, ev.player_id, "shot",
                    _fmt(ev.location.x), _fmt(ev.location.y), "", "",
                    int(ev.is_goal),
                    "" if ev.assisted_by is None else ev.assisted_by,
                ])
    return buf.getvalue()


def _fmt(v: float) -> str:
    return repr(v) if v != int(v) else str(int(v))


def segment_possessions(log_: MatchEventLog) -> MatchEventLog:
    """Assign possession ids to passes. A possession is a maximal run of
    consecutive same-team events; it ends at an unsuccessful pass, at a
    shot (saved or scored), or when the other team acts next."""
    counter = 0
    current: list[PassRecord] = []
    current_team: Optional[str] = None

    def close(ends_with_shot: bool) -> None:
        nonlocal counter, current
        if current:
            pid = f"{log_.match_id}:{counter}"
            counter += 1
            for p in current:
                p.possession_id = pid
            current[-1].is_last_of_possession = True
            current[-1].possession_ends_with_shot = ends_with_shot
        current = []

    for ev in log_.events:
        if current_team is not None and ev.team_id != current_team:
            close(ends_with_shot=False)
        current_team = ev.team_id
        if isinstance(ev, PassRecord):
            current.append(ev)
            if not ev.successful:
                close(ends_with_shot=False)
                current_team = None  # rebound/next event starts fresh
        else:
            close(ends_with_shot=True)
            current_team = None
    close(ends_with_shot=False)
    return log_


def insert_virtual_passes(log_: MatchEventLog) -> MatchEventLog:
    """Insert a virtual (always successful) pass wherever two consecutive
    passes of the same possession leave a coordinate gap. The virtual pass
    belongs to the player executing the next real pass. Events are
    re-sequenced to consecutive integers, assist links preserved."""
    out: list[Event] = []
    prev_pass: Optional[PassRecord] = None
    for ev in log_.events:
        if isinstance(ev, PassRecord):
            if (prev_pass is not None
                    and ev.possession_id is not None
                    and prev_pass.possession_id == ev.possession_id
                    and prev_pass.end != ev.start):
                out.append(PassRecord(
                    match_id=ev.match_id, seq=-1, team_id=ev.team_id,
                    player_id=ev.player_id, start=prev_pass.end, end=ev.start,
                    successful=True, virtual=True,
                    possession_id=ev.possession_id,
                ))
            prev_pass = ev
        else:
            prev_pass = None
        out.append(ev)

    seq_map: dict[int, int] = {}
    for new_seq, ev in enumerate(out, start=1):
        if ev.seq >= 0:
            seq_map[ev.seq] = new_seq
        ev.seq = new_seq
    for ev in out:
        if isinstance(ev, ShotRecord) and ev.assisted_by is not None:
            ev.assisted_by = seq_map[ev.assisted_by]
        elif isinstance(ev, PassRecord) and ev.assist_for_shot is not None:
            ev.assist_for_shot = seq_map[ev.assist_for_shot]
    return MatchEventLog(match_id=log_.match_id, teams=log_.teams, events=out)


def augment(logs: list[MatchEventLog]) -> list[MatchEventLog]:
    """segment_possessions followed by insert_virtual_passes, per match."""
    return [insert_virtual_passes(segment_possessions(lg)) for lg in logs]


def build_team_event_sets(logs: list[MatchEventLog], team_id: str) -> TeamEventSet:
    """Pool the season's events for one team: its own passes/shots plus
    everything its opponents did in the matches it played."""
    own_p: list[PassRecord] = []
    opp_p: list[PassRecord] = []
    own_s: list[ShotRecord] = []
    opp_s: list[ShotRecord] = []
    seen = False
    for lg in logs:
        if team_id not in lg.teams:
            continue
        seen = True
        for ev in lg.events:
            if isinstance(ev, PassRecord):
                (own_p if ev.team_id == team_id else opp_p).append(ev)
            else:
                (own_s if ev.team_id == team_id else opp_s).append(ev)
    if not seen:
        raise ValidationError(f"team {team_id!r} appears in no match log")
    return TeamEventSet(team_id=team_id, own_passes=own_p, opponent_passes=opp_p,
                        own_shots=own_s, opponent_shots=opp_s)


def all_team_ids(logs: list[MatchEventLog]) -> list[str]:
    teams: set[str] = set()
    for lg in logs:
        teams.update(lg.teams)
    return sorted(teams)


def parse_roster(source: Union[str, Iterable[str]]) -> dict[str, PlayerInfo]:
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty roster file") from None
    if [c.strip() for c in header] != ROSTER_HEADER:
        raise EventParseError(f"unexpected roster header {header!r}", 1)
    roster: dict[str, PlayerInfo] = {}
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise EventParseError(f"expected 4 columns, got {len(row)}", line_no)
        player_id, name, team_id, position = (c.strip() for c in row)
        if position not in POSITIONS:
            raise EventParseError(f"unknown position {position!r}", line_no)
        if player_id in roster:
            raise ValidationError(f"duplicate roster entry for {player_id!r}")
        roster[player_id] = PlayerInfo(player_id, name, team_id, position)
    if not roster:
        raise ValidationError("roster file contains no players")
    return roster


def serialize_roster(roster: dict[str, PlayerInfo]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROSTER_HEADER)
    for pid in sorted(roster):
        info = roster[pid]
        w.writerow([info.player_id, info.name, info.team_id, info.position])
    return buf.getvalue()
