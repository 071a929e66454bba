"""QPass: team-specific field valuation and intrinsic pass quality."""

from .events import (MatchEventLog, PassRecord, Point, ShotRecord, TeamEventSet,
                     mirror, parse_events, parse_roster)
from .fieldvalue import (FieldValues, TransitionSystem, ValuationConfig,
                         accumulate_transitions, normalize_rows,
                         run_team_valuation, solve_field_values)
from .kernels import backend_name
from .metric import (PlayerRanking, QPassRecord, qpass_of_pass, rank_players,
                     top_passes, unsuccessful_cdf)
from .partition import (Clustering, ClusterAssignment, PartitionConfig,
                        ScalerParams, TeamPartition, build_partition,
                        mini_batch_kmeans, min_max_scale)
from .synth import SyntheticLeagueSpec, TeamStyle, generate_synthetic_league

__version__ = "0.1.0"
__all__ = [
    "MatchEventLog", "PassRecord", "Point", "ShotRecord", "TeamEventSet",
    "mirror", "parse_events", "parse_roster",
    "FieldValues", "TransitionSystem", "ValuationConfig",
    "accumulate_transitions", "normalize_rows", "run_team_valuation",
    "solve_field_values",
    "backend_name",
    "PlayerRanking", "QPassRecord", "qpass_of_pass", "rank_players",
    "top_passes", "unsuccessful_cdf",
    "Clustering", "ClusterAssignment", "PartitionConfig", "ScalerParams",
    "TeamPartition", "build_partition", "mini_batch_kmeans", "min_max_scale",
    "SyntheticLeagueSpec", "TeamStyle", "generate_synthetic_league",
]
