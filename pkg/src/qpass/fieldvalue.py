"""Field values: the absorbing transition system over possession states.

States 0..c-1 are the team's own-possession clusters, c..2c-1 the
opponent-possession clusters, followed by four terminals paying
(+1, +s, -1, -s) for scored goal, own shot, conceded goal, conceded
shot. Field values are the expected terminal payoff of the absorbing
chain started from each transient state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .events import TeamEventSet
from .partition import PartitionConfig, PartitionResult, TeamPartition, build_partition


class TransitionError(ValueError):
    pass


class ValuationError(RuntimeError):
    """Failure inside the iterative valuation loop, tagged with the team
    and the cluster count of the failing iteration."""


class SingularSystemError(ValueError):
    def __init__(self, trapped: list[int]):
        self.trapped = trapped
        super().__init__(
            f"transient states with no path to a terminal: {trapped}")


@dataclass
class ValuationConfig:
    s: float = 0.7
    partition: PartitionConfig = field(default_factory=PartitionConfig)
    solver_tol: float = 1e-10
    solver_max_iter: int = 100_000
    solver_damping: float = 1.0
    direct_c_threshold: int = 300

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise ValueError("shot value s must lie in [0, 1]")

    def terminal_values(self) -> np.ndarray:
        return np.array([1.0, self.s, -1.0, -self.s])


@dataclass
class TransitionSystem:
    c: int
    counts: sp.csr_matrix  # (2c+4, 2c+4), nonnegative
    terminal_values: np.ndarray  # (+1, s, -1, -s)

    @property
    def n_states(self) -> int:
        return 2 * self.c + 4


@dataclass
class FieldValues:
    values: np.ndarray  # (2c,)
    s: float

    @property
    def c(self) -> int:
        return len(self.values) // 2

    def __getitem__(self, idx: int) -> float:
        return float(self.values[idx])


def accumulate_transitions(result: PartitionResult, events: TeamEventSet,
                           cfg: ValuationConfig) -> TransitionSystem:
    """Count state transitions for every pass and shot of one team's
    season (own events and pooled opponent events, mirror-symmetric
    index layout)."""
    c = result.partition.c
    n = 2 * c + 4
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []

    for side, passes, asg, shot_clusters, shots in (
            ("own", events.own_passes, result.own,
             result.own_shot_clusters, events.own_shots),
            ("opp", events.opponent_passes, result.opp,
             result.opp_shot_clusters, events.opponent_shots)):
        base = 0 if side == "own" else c        # this side's transient block
        other = c if side == "own" else 0       # the other side's block
        goal_t, shot_t = (2 * c, 2 * c + 1) if side == "own" else (2 * c + 2, 2 * c + 3)

        if len(asg.c_s) != len(passes) or len(shot_clusters) != len(shots):
            raise TransitionError("assignments do not match the event lists")

        successful = np.array([p.successful for p in passes], dtype=bool)
        change = np.array([p.successful and p.is_last_of_possession
                           and not p.possession_ends_with_shot
                           for p in passes], dtype=bool)
        needs_le = change | ~successful
        if (asg.l_e[needs_le] < 0).any():
            raise TransitionError("missing l_e assignment on a turnover pass")

        # successful pass: c_s -> c_e
        rows.append(base + asg.c_s[successful])
        cols.append(base + asg.c_e[successful])
        # possession-ending successful pass without shot: c_e -> other + l_e
        rows.append(base + asg.c_e[change])
        cols.append(other + asg.l_e[change])
        # unsuccessful pass: c_s -> other + l_e
        rows.append(base + asg.c_s[~successful])
        cols.append(other + asg.l_e[~successful])

        goals = np.array([s.is_goal for s in shots], dtype=bool)
        rows.append(base + shot_clusters)
        cols.append(np.where(goals, goal_t, shot_t))

        # assisted shot: end of the assist -> location of the shot,
        # in addition to the assist pass's ordinary transition
        pass_index = {(p.match_id, p.seq): i for i, p in enumerate(passes)}
        for j, shot in enumerate(shots):
            if shot.assisted_by is None:
                continue
            i = pass_index.get((shot.match_id, shot.assisted_by))
            if i is None:
                raise TransitionError(
                    f"shot {shot.match_id}:{shot.seq} references an assist pass "
                    "outside this event set")
            rows.append(np.array([base + asg.c_e[i]]))
            cols.append(np.array([base + shot_clusters[j]]))

    row_arr = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    col_arr = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    counts = sp.coo_matrix(
        (np.ones(len(row_arr)), (row_arr, col_arr)), shape=(n, n)).tocsr()
    return TransitionSystem(c=c, counts=counts, terminal_values=cfg.terminal_values())


def normalize_rows(ts: TransitionSystem) -> tuple[sp.csr_matrix, np.ndarray]:
    """Row-normalize the count matrix. Zero rows stay zero; the returned
    boolean mask flags those dangling transient states."""
    totals = np.asarray(ts.counts.sum(axis=1)).ravel()
    inv = np.where(totals > 0, 1.0 / np.where(totals > 0, totals, 1.0), 0.0)
    P = sp.diags(inv) @ ts.counts
    dangling = totals[:2 * ts.c] == 0
    return P.tocsr(), dangling


def _trapped_states(T: sp.csr_matrix, absorbing_rows: np.ndarray,
                    dangling: np.ndarray) -> list[int]:
    """Transient states from which no terminal (or dangling, value-0)
    state is reachable."""
    reach = absorbing_rows | dangling
    Tt = (T != 0).astype(np.int8).tocsr()
    while True:
        new = reach | (Tt @ reach.astype(np.int8) > 0)
        if (new == reach).all():
            break
        reach = new
    return [int(i) for i in np.flatnonzero(~reach & ~dangling)]


def solve_field_values(P: sp.csr_matrix, dangling: np.ndarray,
                       cfg: ValuationConfig) -> FieldValues:
    """Expected terminal payoff per transient state: solve
    v = T v + R b_term where T is the transient block and R the
    transient-to-terminal block. Dangling states get value 0."""
    n_t = P.shape[0] - 4
    T = P[:n_t, :n_t].tocsr()
    R = P[:n_t, n_t:].tocsr()
    b_term = cfg.terminal_values()
    r = R @ b_term

    feeds_terminal = np.asarray((P[:n_t, n_t:] != 0).sum(axis=1)).ravel() > 0
    trapped = _trapped_states(T, feeds_terminal, dangling)
    if trapped:
        raise SingularSystemError(trapped)

    c = n_t // 2
    if c <= cfg.direct_c_threshold:
        A = sp.identity(n_t, format="csc") - T.tocsc()
        v = spla.spsolve(A, r)
    else:
        v = np.zeros(n_t)
        alpha = cfg.solver_damping
        for _ in range(cfg.solver_max_iter):
            nxt = (1.0 - alpha) * v + alpha * (T @ v + r)
            if np.abs(nxt - v).max(initial=0.0) < cfg.solver_tol:
                v = nxt
                break
            v = nxt
        else:
            raise TransitionError(
                f"fixed-point solver did not converge within {cfg.solver_max_iter} "
                "iterations")

    v[dangling] = 0.0
    residual = np.abs(v - T @ v - r).max(initial=0.0)
    if residual > max(cfg.solver_tol, 1e-8):
        raise TransitionError(f"solver residual {residual:.3e} exceeds tolerance")
    return FieldValues(values=np.clip(v, -1.0, 1.0), s=cfg.s)


@dataclass
class TeamValuation:
    team_id: str
    partition: TeamPartition
    field_values: FieldValues
    result: PartitionResult
    iterations: int


def run_team_valuation(team_events: TeamEventSet,
                       cfg: ValuationConfig) -> TeamValuation:
    """The iterative coarsening loop: cluster at c_max, solve, feed the
    values into the next (smaller) clustering, down to c_min."""
    prev: Optional[tuple[PartitionResult, FieldValues]] = None
    result = None
    fv = None
    counts = cfg.partition.cluster_counts()
    for c in counts:
        try:
            result = build_partition(team_events, prev, c, cfg.partition)
            ts = accumulate_transitions(result, team_events, cfg)
            P, dangling = normalize_rows(ts)
            fv = solve_field_values(P, dangling, cfg)
        except Exception as exc:
            raise ValuationError(
                f"team {team_events.team_id}, iteration c={c}: {exc}") from exc
        prev = (result, fv)
    assert result is not None and fv is not None
    return TeamValuation(team_id=team_events.team_id, partition=result.partition,
                         field_values=fv, result=result, iterations=len(counts))


def export_field_values_csv(fv: FieldValues) -> str:
    lines = ["state_kind,cluster_id,value"]
    c = fv.c
    for k in range(c):
        lines.append(f"own,{k},{fv.values[k]:.9f}")
    for k in range(c):
        lines.append(f"opp,{k},{fv.values[c + k]:.9f}")
    return "\n".join(lines) + "\n"


def export_transitions_csv(ts: TransitionSystem) -> str:
    coo = ts.counts.tocoo()
    lines = ["row,col,count"]
    order = np.lexsort((coo.col, coo.row))
    for i in order:
        lines.append(f"{coo.row[i]},{coo.col[i]},{int(coo.data[i])}")
    return "\n".join(lines) + "\n"
