"""Seeded synthetic-league generator.

Matches are alternating possessions; each possession is a random walk
over pitch positions with per-team style knobs. Output is the event and
roster CSV formats consumed by the parser, byte-identical for a fixed
seed. Positional priors are chosen so the pipeline's qualitative
position ordering (goalkeepers highest median QPass, attackers lowest)
is reproducible on generated data; that is a modeling choice of this
generator, not an empirical claim.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .events import EVENT_HEADER, ROSTER_HEADER

# squad layout and positional priors (attack frame, x in [0,100])
_SQUAD = [("GK", 1), ("DF", 5), ("MF", 5), ("FW", 4)]
_HOME_X = {"GK": 5.0, "DF": 25.0, "MF": 50.0, "FW": 75.0}
_ZONE_SIGMA = {"GK": 9.0, "DF": 16.0, "MF": 18.0, "FW": 16.0}
# mean forward progress of a pass, by passer position: keepers launch
# long, forwards mostly recycle laterally or backwards
_PASS_DX = {"GK": 26.0, "DF": 15.0, "MF": 6.0, "FW": -4.0}


@dataclass
class TeamStyle:
    retention: float = 0.90        # keep attacking after a successful pass
    turnover_rate: float = 0.10    # a pass is unsuccessful
    forward_bias: float = 0.0      # team-wide shift on pass progress
    shot_propensity: tuple[float, float, float] = (0.0, 0.01, 0.30)  # per third
    clearance_rate: float = 0.03   # deep long-ball turnover
    goal_conversion: float = 0.12
    deep_pressure: float = 3.0     # turnover multiplier in the defensive third

    def validate(self) -> None:
        probs = [self.retention, self.turnover_rate, self.clearance_rate,
                 self.goal_conversion, *self.shot_propensity]
        if self.deep_pressure < 0:
            raise ValueError(f"deep_pressure must be nonnegative: {self}")
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError(f"style probabilities must lie in [0,1]: {self}")


@dataclass
class SyntheticLeagueSpec:
    n_teams: int = 4
    matches_per_pairing: int = 1
    possessions_per_match: int = 150
    seed: int = 0
    styles: Optional[list[TeamStyle]] = None  # per team; default style if None
    default_style: TeamStyle = field(default_factory=TeamStyle)

    def validate(self) -> None:
        if self.n_teams < 2:
            raise ValueError("need at least 2 teams")
        if self.matches_per_pairing < 1 or self.possessions_per_match < 1:
            raise ValueError("matches_per_pairing and possessions_per_match "
                             "must be positive")
        if self.styles is not None and len(self.styles) != self.n_teams:
            raise ValueError("styles must have one entry per team")
        for style in (self.styles or [self.default_style]):
            style.validate()

    def style_of(self, team_index: int) -> TeamStyle:
        return self.styles[team_index] if self.styles else self.default_style


def league_scale_spec(seed: int = 0) -> SyntheticLeagueSpec:
    """A 20-team double round robin sized to roughly 330k passes and
    8.6k shots league-wide."""
    style = TeamStyle(turnover_rate=0.065, retention=0.93,
                      shot_propensity=(0.0, 0.008, 0.055))
    return SyntheticLeagueSpec(n_teams=20, matches_per_pairing=2,
                               possessions_per_match=150, seed=seed,
                               default_style=style)


def _team_id(i: int) -> str:
    return f"T{i + 1:02d}"


def _roster(n_teams: int) -> list[tuple[str, str, str, str]]:
    rows = []
    for t in range(n_teams):
        tid = _team_id(t)
        p = 0
        for pos, count in _SQUAD:
            for _ in range(count):
                p += 1
                pid = f"{tid}P{p:02d}"
                rows.append((pid, f"{pos} {pid}", tid, pos))
    return rows


class _Team:
    def __init__(self, index: int, style: TeamStyle):
        self.team_id = _team_id(index)
        self.style = style
        self.players: list[tuple[str, str]] = []  # (player_id, position)
        p = 0
        for pos, count in _SQUAD:
            for _ in range(count):
                p += 1
                self.players.append((f"{self.team_id}P{p:02d}", pos))
        self.home_x = np.array([_HOME_X[pos] for _, pos in self.players])
        self.sigma = np.array([_ZONE_SIGMA[pos] for _, pos in self.players])


def _clamp(v: float) -> float:
    return min(max(v, 0.0), 100.0)


def _pick_player(team: _Team, x: float, rng: np.random.Generator) -> tuple[str, str]:
    w = np.exp(-((x - team.home_x) / team.sigma) ** 2)
    w /= w.sum()
    return team.players[int(rng.choice(len(team.players), p=w))]


def _zone(x: float) -> int:
    return 0 if x < 100.0 / 3 else (1 if x < 200.0 / 3 else 2)


class _MatchWriter:
    def __init__(self, writer, match_id: str):
        self.w = writer
        self.match_id = match_id
        self.seq = 0

    def emit_pass(self, team_id, player_id, start, end, successful) -> int:
        self.seq += 1
        self.w.writerow([self.match_id, self.seq, team_id, player_id, "pass",
                         f"{start[0]:.2f}", f"{start[1]:.2f}",
                         f"{end[0]:.2f}", f"{end[1]:.2f}",
                         int(successful), ""])
        return self.seq

    def emit_shot(self, team_id, player_id, loc, is_goal, assist_seq) -> int:
        self.seq += 1
        self.w.writerow([self.match_id, self.seq, team_id, player_id, "shot",
                         f"{loc[0]:.2f}", f"{loc[1]:.2f}", "", "",
                         int(is_goal),
                         "" if assist_seq is None else assist_seq])
        return self.seq


def _play_possession(out: _MatchWriter, team: _Team, start_xy: tuple[float, float],
                     rng: np.random.Generator,
                     max_passes: int = 30) -> tuple[str, tuple[float, float]]:
    """Simulate one possession. Returns how it ended ('turnover', 'shot',
    'held') and the ball location, in the possessing team's frame."""
    style = team.style
    x, y = start_xy
    for _ in range(max_passes):
        player_id, pos = _pick_player(team, x, rng)

        if x < 22.0 and rng.random() < style.clearance_rate:
            end = (_clamp(x + 50.0 + rng.normal(0.0, 8.0)),
                   _clamp(y + rng.normal(0.0, 15.0)))
            out.emit_pass(team.team_id, player_id, (x, y), end, successful=False)
            return "turnover", end

        dx = _PASS_DX[pos] + style.forward_bias + rng.normal(0.0, 7.0)
        dy = rng.normal(0.0, 12.0)
        end = (_clamp(x + dx), _clamp(y + dy))
        # opponents press high: short passing out of the defensive third
        # carries an elevated turnover risk, which is what makes the long
        # clearance the better gamble there
        p_fail = style.turnover_rate
        if x < 100.0 / 3:
            p_fail = min(1.0, p_fail * style.deep_pressure)
        successful = rng.random() >= p_fail
        assist_seq = out.emit_pass(team.team_id, player_id, (x, y), end,
                                   successful=successful)
        if not successful:
            return "turnover", end

        if rng.random() < style.shot_propensity[_zone(end[0])]:
            shooter_id, _ = _pick_player(team, end[0], rng)
            is_goal = rng.random() < style.goal_conversion
            out.emit_shot(team.team_id, shooter_id, end, is_goal, assist_seq)
            return "shot", end

        if rng.random() >= style.retention:
            return "held", end

        x, y = end
        if rng.random() < 0.35:  # carry before the next pass
            x = _clamp(x + rng.normal(1.5, 2.5))
            y = _clamp(y + rng.normal(0.0, 4.0))
    return "held", (x, y)


def _play_match(out: _MatchWriter, home: _Team, away: _Team, n_possessions: int,
                rng: np.random.Generator) -> None:
    attacking, defending = home, away
    ball = (50.0, 50.0)
    for _ in range(n_possessions):
        ended, loc = _play_possession(out, attacking, ball, rng)
        attacking, defending = defending, attacking
        if ended == "shot":
            # goal kick for the new possessing team
            ball = (_clamp(6.0 + rng.normal(0.0, 2.0)),
                    _clamp(50.0 + rng.normal(0.0, 10.0)))
        else:
            # mirrored turnover/hand-over location in the new team's frame
            ball = (_clamp(100.0 - loc[0]), _clamp(100.0 - loc[1]))


def generate_synthetic_league(spec: SyntheticLeagueSpec) -> tuple[str, str]:
    """Returns (event_csv, roster_csv) for a full round-robin league."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    teams = [_Team(i, spec.style_of(i)) for i in range(spec.n_teams)]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(EVENT_HEADER)
    match_no = 0
    for rnd in range(spec.matches_per_pairing):
        for i in range(spec.n_teams):
            for j in range(spec.n_teams):
                if i == j or (rnd % 2 == 0 and i > j) or (rnd % 2 == 1 and i < j):
                    continue
                match_no += 1
                out = _MatchWriter(writer, f"M{match_no:04d}")
                _play_match(out, teams[i], teams[j], spec.possessions_per_match, rng)

    roster_buf = io.StringIO()
    rw = csv.writer(roster_buf, lineterminator="\n")
    rw.writerow(ROSTER_HEADER)
    for row in _roster(spec.n_teams):
        rw.writerow(row)
    return buf.getvalue(), roster_buf.getvalue()
