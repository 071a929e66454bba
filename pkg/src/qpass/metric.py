"""The QPass metric: per-pass scoring, player rankings, and the
unsuccessful-pass distribution analysis."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from statistics import median
from typing import Optional

import numpy as np

from .events import PassRecord, PlayerInfo, POSITIONS
from .fieldvalue import FieldValues
from .partition import ClusterAssignment, PartitionResult

log = logging.getLogger(__name__)

DEFAULT_MIN_PASSES = 100


class ScoringError(ValueError):
    pass


@dataclass(frozen=True)
class QPassRecord:
    pass_ref: PassRecord
    qpass: float
    f_s: float
    f_e: float
    l_e_value: Optional[float]
    successful: bool


@dataclass(frozen=True)
class PlayerRanking:
    player_id: str
    team_id: str
    position: str
    pass_count: int
    median_qpass: float


def qpass_of_pass(p: PassRecord, assignment: ClusterAssignment,
                  fv: FieldValues) -> QPassRecord:
    """Change in field value caused by one pass. A successful pass is
    scored against the end cluster's value; an unsuccessful one against
    the opponent-possession value of the mirrored end location."""
    c = fv.c
    f_s = fv[assignment.c_s]
    f_e = fv[assignment.c_e]
    if p.successful:
        return QPassRecord(pass_ref=p, qpass=f_e - f_s, f_s=f_s, f_e=f_e,
                           l_e_value=None, successful=True)
    if assignment.l_e is None:
        raise ScoringError(
            f"unsuccessful pass {p.match_id}:{p.seq} has no l_e assignment")
    l_e_value = fv[c + assignment.l_e]
    return QPassRecord(pass_ref=p, qpass=l_e_value - f_s, f_s=f_s, f_e=f_e,
                       l_e_value=l_e_value, successful=False)


def score_team_passes(result: PartitionResult, passes: list[PassRecord],
                      fv: FieldValues) -> list[QPassRecord]:
    """Score a team's own passes against its final partition and values.
    The pass list must be the one the partition was built from."""
    if len(passes) != len(result.own.c_s):
        raise ScoringError("pass list does not match the partition assignments")
    return [qpass_of_pass(p, result.own.record(i), fv)
            for i, p in enumerate(passes)]


def rank_players(records: list[QPassRecord], roster: dict[str, PlayerInfo],
                 min_passes: int = DEFAULT_MIN_PASSES) -> list[PlayerRanking]:
    """Median QPass per player over non-virtual passes, descending;
    players under the pass threshold are dropped. Ties order by
    player_id."""
    per_player: dict[str, list[float]] = {}
    for rec in records:
        if rec.pass_ref.virtual:
            continue
        per_player.setdefault(rec.pass_ref.player_id, []).append(rec.qpass)

    rankings = []
    for player_id, values in per_player.items():
        if len(values) < min_passes:
            continue
        info = roster.get(player_id)
        if info is None:
            log.warning("player %s has no roster entry; skipped", player_id)
            continue
        rankings.append(PlayerRanking(
            player_id=player_id, team_id=info.team_id, position=info.position,
            pass_count=len(values), median_qpass=float(median(values))))
    rankings.sort(key=lambda r: (-r.median_qpass, r.player_id))
    return rankings


def top_passes(records: list[QPassRecord], player_id: str,
               n: int) -> list[QPassRecord]:
    """The player's n highest-QPass records (all of them if fewer);
    equal values order by seq."""
    mine = [r for r in records if r.pass_ref.player_id == player_id]
    if not mine:
        raise ScoringError(f"no scored passes for player {player_id!r}")
    mine.sort(key=lambda r: (-r.qpass, r.pass_ref.match_id, r.pass_ref.seq))
    return mine[:n]


@dataclass(frozen=True)
class GroupCdf:
    position: str
    values: np.ndarray     # sorted qpass values of unsuccessful passes
    fractions: np.ndarray  # cumulative fractions, last is 1.0
    beneficial_fraction: float  # share with qpass > 0


def unsuccessful_cdf(records: list[QPassRecord],
                     roster: dict[str, PlayerInfo]) -> dict[str, GroupCdf]:
    """Empirical CDF of unsuccessful-pass QPass values per position
    group, with the beneficial (qpass > 0) share. Virtual passes are
    excluded; empty groups are omitted with a warning."""
    by_group: dict[str, list[float]] = {pos: [] for pos in POSITIONS}
    for rec in records:
        if rec.successful or rec.pass_ref.virtual:
            continue
        info = roster.get(rec.pass_ref.player_id)
        if info is None:
            continue
        by_group[info.position].append(rec.qpass)

    out: dict[str, GroupCdf] = {}
    for pos, vals in by_group.items():
        if not vals:
            log.warning("no unsuccessful passes for position group %s", pos)
            continue
        arr = np.sort(np.asarray(vals))
        fractions = np.arange(1, len(arr) + 1) / len(arr)
        out[pos] = GroupCdf(position=pos, values=arr, fractions=fractions,
                            beneficial_fraction=float((arr > 0).mean()))
    return out


def export_rankings_csv(rankings: list[PlayerRanking],
                        roster: dict[str, PlayerInfo]) -> str:
    lines = ["player,qpass_median,team,position,pass_count"]
    for r in rankings:
        name = roster[r.player_id].name if r.player_id in roster else r.player_id
        lines.append(f"{name},{r.median_qpass:.6f},{r.team_id},"
                     f"{r.position},{r.pass_count}")
    return "\n".join(lines) + "\n"


def export_cdf_csv(cdfs: dict[str, GroupCdf]) -> str:
    lines = ["position,qpass,cumulative_fraction"]
    for pos in POSITIONS:
        cdf = cdfs.get(pos)
        if cdf is None:
            continue
        for v, f in zip(cdf.values, cdf.fractions):
            lines.append(f"{pos},{v:.9f},{f:.9f}")
    return "\n".join(lines) + "\n"
