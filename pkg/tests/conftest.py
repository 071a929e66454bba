"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp

from qpass.events import EVENT_HEADER, ROSTER_HEADER
from qpass.fieldvalue import TransitionSystem, ValuationConfig
from qpass.partition import (Clustering, PartitionResult, PassAssignments,
                             ScalerParams, TeamPartition)


def event_csv(rows: list[list]) -> str:
    """Build an event CSV from row lists (missing columns padded)."""
    lines = [",".join(EVENT_HEADER)]
    for row in rows:
        row = [str(v) for v in row]
        row += [""] * (len(EVENT_HEADER) - len(row))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def roster_csv(rows: list[list]) -> str:
    lines = [",".join(ROSTER_HEADER)]
    lines += [",".join(str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def pass_row(match, seq, team, player, x1, y1, x2, y2, ok=1):
    return [match, seq, team, player, "pass", x1, y1, x2, y2, ok]


def shot_row(match, seq, team, player, x, y, goal=0, assist=""):
    return [match, seq, team, player, "shot", x, y, "", "", goal, assist]


def identity_clustering(centroids: np.ndarray) -> Clustering:
    """A Clustering whose scaler is the identity on [0,1] features."""
    centroids = np.asarray(centroids, dtype=np.float64)
    d = centroids.shape[1]
    scaler = ScalerParams(mins=np.zeros(d), maxs=np.ones(d))
    return Clustering(c=len(centroids), centroids=centroids, scaler=scaler,
                      rng_seed=0)


def empty_assignments() -> PassAssignments:
    z = np.empty(0, dtype=np.int64)
    f = np.empty(0, dtype=np.float64)
    return PassAssignments(c_s=z, c_e=z.copy(), l_e=z.copy(), f_s=f, f_e=f.copy())


def make_assignments(c_s, c_e, l_e=None) -> PassAssignments:
    c_s = np.asarray(c_s, dtype=np.int64)
    c_e = np.asarray(c_e, dtype=np.int64)
    if l_e is None:
        l_e = np.full(len(c_s), -1, dtype=np.int64)
    else:
        l_e = np.asarray(l_e, dtype=np.int64)
    zeros = np.zeros(len(c_s))
    return PassAssignments(c_s=c_s, c_e=c_e, l_e=l_e, f_s=zeros, f_e=zeros.copy())


def make_result(c: int, own: PassAssignments, opp: PassAssignments,
                own_shots=(), opp_shots=()) -> PartitionResult:
    """PartitionResult with placeholder clusterings (only c matters for
    transition accumulation)."""
    cl = identity_clustering(np.zeros((c, 3)))
    return PartitionResult(
        partition=TeamPartition(own=cl, opp=cl),
        own=own, opp=opp,
        own_shot_clusters=np.asarray(own_shots, dtype=np.int64),
        opp_shot_clusters=np.asarray(opp_shots, dtype=np.int64))


def system_from_counts(c: int, entries: dict[tuple[int, int], float],
                       s: float = 0.7) -> TransitionSystem:
    """TransitionSystem over 2c+4 states from a {(row, col): count} map."""
    n = 2 * c + 4
    mat = sp.dok_matrix((n, n))
    for (r, col), v in entries.items():
        mat[r, col] = v
    cfg = ValuationConfig(s=s)
    return TransitionSystem(c=c, counts=mat.tocsr(),
                            terminal_values=cfg.terminal_values())


def random_absorbing_system(rng: np.random.Generator, c: int, s: float = 0.7):
    """Random row-stochastic (2c+4)-state system where every non-dangling
    transient row keeps some terminal-reaching mass. Returns (P, b_term)."""
    n_t = 2 * c
    n = n_t + 4
    P = np.zeros((n, n))
    b_term = np.array([1.0, s, -1.0, -s])
    for i in range(n_t):
        if rng.random() < 0.1:
            continue  # dangling row (value 0 by convention)
        k = int(rng.integers(1, 4))
        targets = rng.choice(n_t, size=k, replace=False)
        weights = rng.random(k)
        term = int(rng.integers(0, 4))
        term_w = 0.05 + rng.random()  # guarantees a path to a terminal
        total = weights.sum() + term_w
        P[i, targets] += weights / total
        P[i, n_t + term] += term_w / total
    return P, b_term


@pytest.fixture(scope="session")
def tiny_league() -> tuple[str, str]:
    """A small deterministic synthetic league (4 teams, 1 round)."""
    from qpass.synth import SyntheticLeagueSpec, generate_synthetic_league
    spec = SyntheticLeagueSpec(n_teams=4, matches_per_pairing=1,
                               possessions_per_match=120, seed=7)
    return generate_synthetic_league(spec)


@pytest.fixture(scope="session")
def tiny_valuation(tiny_league):
    """One team's full (small-c) valuation on the tiny league, plus the
    scored pass records."""
    from qpass import metric
    from qpass.events import all_team_ids, augment, build_team_event_sets, \
        parse_events
    from qpass.fieldvalue import run_team_valuation
    from qpass.partition import PartitionConfig

    logs = augment(parse_events(tiny_league[0]))
    team = all_team_ids(logs)[0]
    team_events = build_team_event_sets(logs, team)
    cfg = ValuationConfig(
        s=0.7, partition=PartitionConfig(c_max=60, c_min=20, c_step=20, seed=3))
    valuation = run_team_valuation(team_events, cfg)
    records = metric.score_team_passes(
        valuation.result, team_events.own_passes, valuation.field_values)
    return team_events, valuation, records
