import numpy as np
import pytest

from qpass.events import PassRecord, PlayerInfo, Point
from qpass.fieldvalue import FieldValues
from qpass.metric import (QPassRecord, ScoringError, export_cdf_csv,
                          export_rankings_csv, qpass_of_pass, rank_players,
                          top_passes, unsuccessful_cdf)
from qpass.partition import ClusterAssignment


def _pass(player="P1", seq=1, successful=True, virtual=False, match="M1"):
    return PassRecord(match_id=match, seq=seq, team_id="TA", player_id=player,
                      start=Point(0, 0), end=Point(10, 10),
                      successful=successful, virtual=virtual)


def _fv(values, s=0.7):
    return FieldValues(values=np.asarray(values, dtype=np.float64), s=s)


def _rec(player, qpass, seq=1, successful=True, virtual=False, match="M1"):
    return QPassRecord(
        pass_ref=_pass(player, seq, successful=successful, virtual=virtual,
                       match=match),
        qpass=qpass, f_s=0.0, f_e=0.0, l_e_value=None, successful=successful)


ROSTER = {
    "P1": PlayerInfo("P1", "One", "TA", "GK"),
    "P2": PlayerInfo("P2", "Two", "TA", "DF"),
    "P3": PlayerInfo("P3", "Three", "TA", "FW"),
}


class TestQPassOfPass:
    def test_successful_same_cluster_scores_zero(self):
        fv = _fv([0.3, -0.1, 0.0, 0.0])
        asg = ClusterAssignment(c_s=1, c_e=1, l_e=None, f_s=0.0, f_e=0.0)
        assert qpass_of_pass(_pass(), asg, fv).qpass == 0.0

    def test_successful_difference(self):
        fv = _fv([-0.2, 0.3, 0.0, 0.0])
        asg = ClusterAssignment(c_s=0, c_e=1, l_e=None, f_s=0.0, f_e=0.0)
        assert abs(qpass_of_pass(_pass(), asg, fv).qpass - 0.5) < 1e-15

    def test_unsuccessful_beneficial_lost_ball(self):
        # f_s = -0.5, fv[c + l_e] = -0.4 -> qpass = +0.1
        fv = _fv([-0.5, 0.0, -0.4, 0.0])
        asg = ClusterAssignment(c_s=0, c_e=1, l_e=0, f_s=0.0, f_e=0.0)
        rec = qpass_of_pass(_pass(successful=False), asg, fv)
        assert abs(rec.qpass - 0.1) < 1e-15
        assert rec.l_e_value == -0.4

    def test_unsuccessful_without_l_e_rejected(self):
        fv = _fv([0.0, 0.0, 0.0, 0.0])
        asg = ClusterAssignment(c_s=0, c_e=1, l_e=None, f_s=0.0, f_e=0.0)
        with pytest.raises(ScoringError):
            qpass_of_pass(_pass(successful=False), asg, fv)

    def test_range_bounded_by_two(self):
        fv = _fv([-1.0, 1.0, -1.0, 1.0])
        asg = ClusterAssignment(c_s=0, c_e=1, l_e=None, f_s=0.0, f_e=0.0)
        assert abs(qpass_of_pass(_pass(), asg, fv).qpass) <= 2.0


class TestRankPlayers:
    def test_threshold_excludes_99_passes(self):
        records = [_rec("P1", 0.1, seq=i) for i in range(99)]
        records += [_rec("P2", 0.0, seq=i) for i in range(100)]
        ranked = rank_players(records, ROSTER, min_passes=100)
        assert [r.player_id for r in ranked] == ["P2"]

    def test_odd_count_median(self):
        records = [_rec("P1", v, seq=i) for i, v in enumerate((-1.0, 0.0, 1.0))]
        ranked = rank_players(records, ROSTER, min_passes=1)
        assert ranked[0].median_qpass == 0.0

    def test_even_count_median_is_middle_mean(self):
        records = [_rec("P1", v, seq=i) for i, v in enumerate((0.0, 0.2))]
        ranked = rank_players(records, ROSTER, min_passes=1)
        assert abs(ranked[0].median_qpass - 0.1) < 1e-15

    def test_virtual_passes_excluded(self):
        records = [_rec("P1", 0.5, seq=1),
                   _rec("P1", 99.0, seq=2, virtual=True)]
        ranked = rank_players(records, ROSTER, min_passes=1)
        assert ranked[0].median_qpass == 0.5
        assert ranked[0].pass_count == 1

    def test_sorted_descending_with_id_tiebreak(self):
        records = [_rec("P2", 0.3), _rec("P1", 0.3), _rec("P3", 0.7)]
        ranked = rank_players(records, ROSTER, min_passes=1)
        assert [r.player_id for r in ranked] == ["P3", "P1", "P2"]

    def test_median_stable_under_duplication(self):
        records = [_rec("P1", v, seq=i) for i, v in enumerate((0.1, 0.4, 0.9))]
        once = rank_players(records, ROSTER, min_passes=1)[0].median_qpass
        twice = rank_players(records * 2, ROSTER, min_passes=1)[0].median_qpass
        assert once == twice

    def test_unrostered_player_skipped(self):
        ranked = rank_players([_rec("PX", 0.5)], ROSTER, min_passes=1)
        assert ranked == []

    def test_empty_records_empty_ranking(self):
        assert rank_players([], ROSTER) == []


class TestTopPasses:
    def test_top_n_sorted_descending(self):
        records = [_rec("P1", i / 100, seq=i) for i in range(500)]
        top = top_passes(records, "P1", 30)
        assert len(top) == 30
        values = [r.qpass for r in top]
        assert values == sorted(values, reverse=True)

    def test_n_larger_than_available(self):
        records = [_rec("P1", 0.1, seq=1), _rec("P1", 0.2, seq=2)]
        assert len(top_passes(records, "P1", 30)) == 2

    def test_tie_breaks_by_seq(self):
        records = [_rec("P1", 0.5, seq=9), _rec("P1", 0.5, seq=3)]
        assert [r.pass_ref.seq for r in top_passes(records, "P1", 2)] == [3, 9]

    def test_unknown_player_rejected(self):
        with pytest.raises(ScoringError):
            top_passes([_rec("P1", 0.1)], "PX", 5)


class TestUnsuccessfulCdf:
    def test_beneficial_fraction_counting(self):
        records = [_rec("P1", -0.3, seq=1, successful=False),
                   _rec("P1", 0.1, seq=2, successful=False)]
        cdfs = unsuccessful_cdf(records, ROSTER)
        assert cdfs["GK"].beneficial_fraction == 0.5

    def test_all_negative_group(self):
        records = [_rec("P2", -0.2, seq=i, successful=False) for i in range(4)]
        cdfs = unsuccessful_cdf(records, ROSTER)
        assert cdfs["DF"].beneficial_fraction == 0.0

    def test_cdf_endpoints(self):
        records = [_rec("P3", v, seq=i, successful=False)
                   for i, v in enumerate((-0.5, -0.1, 0.2, 0.4))]
        cdf = unsuccessful_cdf(records, ROSTER)["FW"]
        assert cdf.fractions[0] == 0.25 and cdf.fractions[-1] == 1.0
        assert (np.diff(cdf.values) >= 0).all()

    def test_successful_and_virtual_excluded(self):
        records = [_rec("P1", 0.5, seq=1, successful=True),
                   _rec("P1", 0.5, seq=2, successful=False, virtual=True)]
        assert "GK" not in unsuccessful_cdf(records, ROSTER)


class TestRankingInvariance:
    def test_constant_shift_leaves_qpass_unchanged(self):
        base = np.array([-0.2, 0.3, -0.4, 0.1])
        asg_ok = ClusterAssignment(c_s=0, c_e=1, l_e=None, f_s=0.0, f_e=0.0)
        asg_fail = ClusterAssignment(c_s=1, c_e=0, l_e=1, f_s=0.0, f_e=0.0)
        for shift in (0.0, 0.25):
            fv = _fv(base + shift)
            ok = qpass_of_pass(_pass(), asg_ok, fv).qpass
            fail = qpass_of_pass(_pass(successful=False), asg_fail, fv).qpass
            if shift == 0.0:
                ok0, fail0 = ok, fail
        assert abs(ok - ok0) < 1e-12 and abs(fail - fail0) < 1e-12


class TestExports:
    def test_rankings_csv(self):
        records = [_rec("P1", 0.5), _rec("P2", 0.1)]
        ranked = rank_players(records, ROSTER, min_passes=1)
        lines = export_rankings_csv(ranked, ROSTER).strip().splitlines()
        assert lines[0] == "player,qpass_median,team,position,pass_count"
        assert lines[1].startswith("One,0.5")

    def test_cdf_csv_grouped_by_position(self):
        records = [_rec("P1", -0.1, seq=1, successful=False),
                   _rec("P3", 0.3, seq=2, successful=False)]
        lines = export_cdf_csv(unsuccessful_cdf(records, ROSTER)) \
            .strip().splitlines()
        assert lines[0] == "position,qpass,cumulative_fraction"
        assert {ln.split(",")[0] for ln in lines[1:]} == {"GK", "FW"}
