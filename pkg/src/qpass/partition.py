"""Team-specific field partitioning.

Two clusterings per team, both over (x, y, field-value) features scaled
to [0,1]: one from the team's own pass endpoints, one from the pooled
endpoints of its opponents. Turnover locations are mirrored into the
other clustering through a spatial nearest-centroid classifier.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, TYPE_CHECKING

import numpy as np

from . import kernels
from .events import TeamEventSet, Point

if TYPE_CHECKING:
    from .fieldvalue import FieldValues


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class ScalerParams:
    mins: np.ndarray  # (3,)
    maxs: np.ndarray  # (3,)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Min-max scale; a constant feature maps to 0. Accepts (n,2)
        arrays, which use the spatial features only."""
        pts = np.asarray(points, dtype=np.float64)
        k = pts.shape[1]
        span = self.maxs[:k] - self.mins[:k]
        safe = np.where(span > 0, span, 1.0)
        scaled = (pts - self.mins[:k]) / safe
        return np.where(span > 0, scaled, 0.0)


def min_max_scale(points: np.ndarray) -> tuple[np.ndarray, ScalerParams]:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ClusteringError("min_max_scale needs a non-empty 2-D point collection")
    scaler = ScalerParams(mins=pts.min(axis=0), maxs=pts.max(axis=0))
    return scaler.transform(pts), scaler


@dataclass
class PartitionConfig:
    c_max: int = 1000
    c_min: int = 100
    c_step: int = 50
    batch_size: int = 1024
    max_iter: int = 300
    tol: float = 1e-4
    init_subset_factor: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.c_min > self.c_max:
            raise ValueError("c_min must not exceed c_max")
        if self.c_step <= 0:
            raise ValueError("c_step must be positive")
        if (self.c_max - self.c_min) % self.c_step != 0:
            raise ValueError("(c_max - c_min) must be divisible by c_step")

    def cluster_counts(self) -> list[int]:
        return list(range(self.c_max, self.c_min - 1, -self.c_step))


@dataclass
class Clustering:
    c: int
    centroids: np.ndarray  # (c, 3) in scaled space
    scaler: ScalerParams
    rng_seed: int

    def assign(self, points: np.ndarray) -> np.ndarray:
        """Nearest centroid over all three scaled features; input is raw
        (n,3) points. Ties break to the lowest index."""
        scaled = np.ascontiguousarray(self.scaler.transform(points))
        labels, _ = kernels.assign_nearest(scaled, self.centroids)
        return labels

    def assign_spatial(self, points: np.ndarray) -> np.ndarray:
        """Nearest centroid over the two spatial features only; input is
        raw (n,2) points (mirrored turnover or shot locations)."""
        scaled = np.ascontiguousarray(self.scaler.transform(points))
        spatial = np.ascontiguousarray(self.centroids[:, :2])
        labels, _ = kernels.assign_nearest(scaled, spatial)
        return labels


@dataclass
class TeamPartition:
    own: Clustering
    opp: Clustering

    def __post_init__(self):
        if self.own.c != self.opp.c:
            raise ValueError("both clusterings must share the cluster count")

    @property
    def c(self) -> int:
        return self.own.c


@dataclass(frozen=True)
class ClusterAssignment:
    c_s: int
    c_e: int
    l_e: Optional[int]
    f_s: float
    f_e: float


def _derive_seed(base: int, *parts) -> int:
    h = hashlib.blake2s(":".join([str(base), *map(str, parts)]).encode(),
                        digest_size=8)
    return int.from_bytes(h.digest(), "little")


def _kmeans_pp(points: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty((c, points.shape[1]))
    centers[0] = points[rng.integers(points.shape[0])]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for k in range(1, c):
        cdf = np.cumsum(d2)
        total = cdf[-1]
        if total <= 0:
            raise ClusteringError(
                f"fewer than {c} distinct points; lower the cluster count")
        # sample proportionally to squared distance via the cumulative sum
        idx = np.searchsorted(cdf, rng.random() * total, side="right")
        idx = min(idx, d2.shape[0] - 1)
        centers[k] = points[idx]
        np.minimum(d2, ((points - centers[k]) ** 2).sum(axis=1), out=d2)
    return centers


def mini_batch_kmeans(points: np.ndarray, c: int, cfg: PartitionConfig,
                      seed: int) -> np.ndarray:
    """Mini-batch k-means with k-means++ init, deterministic for a fixed
    seed. Returns (c, d) centroids in the same (scaled) space as the
    input; the result's inertia is never worse than the init's."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n = pts.shape[0]
    if n < c:
        raise ClusteringError(
            f"{n} points cannot support {c} clusters; lower the cluster count")
    rng = np.random.default_rng(seed)

    subset_size = min(n, max(c, cfg.init_subset_factor * c))
    subset = rng.choice(n, size=subset_size, replace=False)
    centers = _kmeans_pp(pts[subset], c, rng)
    init_centers = centers.copy()

    counts = np.zeros(c, dtype=np.float64)
    if n <= cfg.batch_size:
        batch_idx = None
    else:
        # draw all batch indices up front; one RNG call instead of max_iter
        batch_idx = rng.integers(0, n, size=(cfg.max_iter, cfg.batch_size))
    for it in range(cfg.max_iter):
        batch = pts if batch_idx is None else pts[batch_idx[it]]
        movement = kernels.minibatch_update(batch, centers, counts)
        if movement < cfg.tol:
            break

    # mini-batch updates do not guarantee monotone inertia; honor the
    # contract by keeping the better of init and final centroids
    _, d_init = kernels.assign_nearest(pts, init_centers)
    _, d_final = kernels.assign_nearest(pts, centers)
    if d_init.sum() < d_final.sum():
        centers = init_centers
    return centers


def assign_full(cl: Clustering, point) -> int:
    return int(cl.assign(np.asarray([point], dtype=np.float64))[0])


def assign_spatial(cl: Clustering, point) -> int:
    if isinstance(point, Point):
        point = (point.x, point.y)
    return int(cl.assign_spatial(np.asarray([point], dtype=np.float64))[0])


@dataclass
class PassAssignments:
    """Cluster assignments for a list of passes (aligned by index).
    l_e is -1 where absent; f_s/f_e are the field-value features carried
    over from the previous pipeline iteration."""

    c_s: np.ndarray
    c_e: np.ndarray
    l_e: np.ndarray
    f_s: np.ndarray
    f_e: np.ndarray

    def record(self, i: int) -> ClusterAssignment:
        le = int(self.l_e[i])
        return ClusterAssignment(
            c_s=int(self.c_s[i]), c_e=int(self.c_e[i]),
            l_e=None if le < 0 else le,
            f_s=float(self.f_s[i]), f_e=float(self.f_e[i]))


@dataclass
class PartitionResult:
    partition: TeamPartition
    own: PassAssignments
    opp: PassAssignments
    own_shot_clusters: np.ndarray
    opp_shot_clusters: np.ndarray


def _pass_coords(passes) -> tuple[np.ndarray, np.ndarray]:
    starts = np.array([[p.start.x, p.start.y] for p in passes], dtype=np.float64)
    ends = np.array([[p.end.x, p.end.y] for p in passes], dtype=np.float64)
    return starts.reshape(-1, 2), ends.reshape(-1, 2)


def _needs_l_e(passes) -> np.ndarray:
    return np.array(
        [(not p.successful) or (p.is_last_of_possession
                                and not p.possession_ends_with_shot)
         for p in passes], dtype=bool)


@dataclass
class _SideArrays:
    starts: np.ndarray        # (n, 2)
    ends: np.ndarray          # (n, 2)
    needs_l_e: np.ndarray     # (n,) bool
    mirrored_ends: np.ndarray  # (sum(needs_l_e), 2)
    shot_points: np.ndarray   # (n_shots, 2)


def _side_arrays(passes, shots) -> _SideArrays:
    starts, ends = _pass_coords(passes)
    mask = _needs_l_e(passes)
    shot_pts = np.array([[s.location.x, s.location.y] for s in shots],
                        dtype=np.float64).reshape(-1, 2)
    return _SideArrays(starts=starts, ends=ends, needs_l_e=mask,
                       mirrored_ends=100.0 - ends[mask], shot_points=shot_pts)


def _event_arrays(team_events: TeamEventSet) -> tuple[_SideArrays, _SideArrays]:
    """Coordinate arrays are identical across the 19 coarsening
    iterations; cache them on the event set."""
    cached = getattr(team_events, "_qpass_arrays", None)
    if cached is None:
        cached = (_side_arrays(team_events.own_passes, team_events.own_shots),
                  _side_arrays(team_events.opponent_passes,
                               team_events.opponent_shots))
        team_events._qpass_arrays = cached
    return cached


def _build_side(side: _SideArrays, f_s: np.ndarray, f_e: np.ndarray, c: int,
                cfg: PartitionConfig, seed: int) -> tuple[Clustering, PassAssignments]:
    start_feats = np.column_stack([side.starts, f_s])
    end_feats = np.column_stack([side.ends, f_e])
    training = np.vstack([start_feats, end_feats])
    scaled, scaler = min_max_scale(training)
    centroids = mini_batch_kmeans(scaled, c, cfg, seed)
    cl = Clustering(c=c, centroids=centroids, scaler=scaler, rng_seed=seed)
    assignments = PassAssignments(
        c_s=cl.assign(start_feats), c_e=cl.assign(end_feats),
        l_e=np.full(len(f_s), -1, dtype=np.int64), f_s=f_s, f_e=f_e)
    return cl, assignments


def build_partition(team_events: TeamEventSet,
                    prev: Optional[tuple["PartitionResult", "FieldValues"]],
                    c: int, cfg: PartitionConfig) -> PartitionResult:
    """One iteration of the field-partitioning step: cluster both event
    sets at cluster count c, using the previous iteration's field values
    as the third feature (zero on the first iteration), then assign
    every pass and shot."""
    own_passes = team_events.own_passes
    opp_passes = team_events.opponent_passes
    if not own_passes or not opp_passes:
        raise ClusteringError("both the team and its opponents need pass events")

    n_own, n_opp = len(own_passes), len(opp_passes)
    if prev is None:
        f_s_own = np.zeros(n_own)
        f_e_own = np.zeros(n_own)
        f_s_opp = np.zeros(n_opp)
        f_e_opp = np.zeros(n_opp)
    else:
        prev_result, prev_values = prev
        prev_c = prev_result.partition.c
        vals = prev_values.values
        f_s_own = vals[prev_result.own.c_s]
        f_e_own = vals[prev_result.own.c_e]
        f_s_opp = vals[prev_c + prev_result.opp.c_s]
        f_e_opp = vals[prev_c + prev_result.opp.c_e]

    own_arr, opp_arr = _event_arrays(team_events)
    seed_own = _derive_seed(cfg.seed, team_events.team_id, c, "own")
    seed_opp = _derive_seed(cfg.seed, team_events.team_id, c, "opp")
    cl_own, asg_own = _build_side(own_arr, f_s_own, f_e_own, c, cfg, seed_own)
    cl_opp, asg_opp = _build_side(opp_arr, f_s_opp, f_e_opp, c, cfg, seed_opp)

    if own_arr.needs_l_e.any():
        asg_own.l_e[own_arr.needs_l_e] = cl_opp.assign_spatial(own_arr.mirrored_ends)
    if opp_arr.needs_l_e.any():
        asg_opp.l_e[opp_arr.needs_l_e] = cl_own.assign_spatial(opp_arr.mirrored_ends)

    own_shots = (cl_own.assign_spatial(own_arr.shot_points)
                 if len(own_arr.shot_points) else np.empty(0, dtype=np.int64))
    opp_shots = (cl_opp.assign_spatial(opp_arr.shot_points)
                 if len(opp_arr.shot_points) else np.empty(0, dtype=np.int64))

    return PartitionResult(
        partition=TeamPartition(own=cl_own, opp=cl_opp),
        own=asg_own, opp=asg_opp,
        own_shot_clusters=own_shots, opp_shot_clusters=opp_shots)


def export_partition_csv(partition: TeamPartition, side: str = "own") -> str:
    """Centroids in raw units: cluster_id,x_centroid,y_centroid,f_centroid."""
    cl = partition.own if side == "own" else partition.opp
    span = cl.scaler.maxs - cl.scaler.mins
    raw = cl.centroids * np.where(span > 0, span, 0.0) + cl.scaler.mins
    lines = ["cluster_id,x_centroid,y_centroid,f_centroid"]
    for i, (x, y, f) in enumerate(raw):
        lines.append(f"{i},{x:.6f},{y:.6f},{f:.6f}")
    return "\n".join(lines) + "\n"


def export_scaler_csv(partition: TeamPartition, side: str = "own") -> str:
    cl = partition.own if side == "own" else partition.opp
    lines = ["feature,min,max"]
    for name, mn, mx in zip(("x", "y", "f"), cl.scaler.mins, cl.scaler.maxs):
        lines.append(f"{name},{mn:.9f},{mx:.9f}")
    return "\n".join(lines) + "\n"
