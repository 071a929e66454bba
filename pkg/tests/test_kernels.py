"""Backend parity: the compiled kernels and the numpy fallback must
produce identical results, bit for bit."""

import numpy as np
import pytest

from qpass import _kernels_py
from qpass import kernels

_core = pytest.importorskip("qpass._core")


class TestAssignNearest:
    def test_bitwise_parity(self):
        rng = np.random.default_rng(0)
        pts = rng.random((500, 3))
        for c in (1, 7, 200):
            cent = rng.random((c, 3))
            l1, d1 = _core.assign_nearest(pts, cent)
            l2, d2 = _kernels_py.assign_nearest(pts, cent)
            assert (l1 == l2).all()
            assert (d1 == d2).all()

    def test_two_feature_parity(self):
        rng = np.random.default_rng(1)
        pts = rng.random((200, 2))
        cent = rng.random((9, 2))
        l1, d1 = _core.assign_nearest(pts, cent)
        l2, d2 = _kernels_py.assign_nearest(pts, cent)
        assert (l1 == l2).all() and (d1 == d2).all()

    def test_tie_breaks_identically(self):
        pts = np.array([[0.5, 0.5, 0.5]])
        cent = np.array([[0.4, 0.5, 0.5], [0.6, 0.5, 0.5], [0.4, 0.5, 0.5]])
        for impl in (_core, _kernels_py):
            labels, _ = impl.assign_nearest(pts, cent)
            assert labels[0] == 0

    def test_dimension_mismatch_rejected(self):
        for impl in (_core, _kernels_py):
            with pytest.raises(ValueError):
                impl.assign_nearest(np.zeros((3, 3)), np.zeros((2, 2)))


class TestMinibatchUpdate:
    def test_bitwise_parity(self):
        rng = np.random.default_rng(2)
        batch = rng.random((256, 3))
        cent = rng.random((40, 3))
        c1, k1 = cent.copy(), np.zeros(40)
        c2, k2 = cent.copy(), np.zeros(40)
        moves1 = [_core.minibatch_update(batch, c1, k1) for _ in range(20)]
        moves2 = [_kernels_py.minibatch_update(batch, c2, k2) for _ in range(20)]
        assert (c1 == c2).all()
        assert (k1 == k2).all()
        assert moves1 == moves2

    def test_counts_accumulate(self):
        rng = np.random.default_rng(3)
        batch = rng.random((100, 3))
        cent = rng.random((5, 3))
        counts = np.zeros(5)
        kernels.minibatch_update(batch, cent, counts)
        assert counts.sum() == 100


class TestAbsorptionWalks:
    def test_bitwise_parity(self):
        rng = np.random.default_rng(4)
        P = np.zeros((8, 8))
        P[0, [1, 4]] = 0.5
        P[1, [0, 5]] = [0.3, 0.7]
        P[2, 6] = 1.0
        # row 3 dangling
        cum = np.cumsum(P, axis=1)
        pos = P > 0
        last = np.where(pos.any(axis=1), 7 - pos[:, ::-1].argmax(axis=1),
                        -1).astype(np.int64)
        b = np.array([1.0, 0.7, -1.0, -0.7])
        for start in (0, 1, 2, 3):
            p1, c1 = _core.absorption_walks(cum, 4, b, last, start, 2000,
                                            np.uint64(99), 1000)
            p2, c2 = _kernels_py.absorption_walks(cum, 4, b, last, start, 2000,
                                                  99, 1000)
            assert (p1 == p2).all()
            assert (c1 == c2).all()

    def test_cap_flags_match(self):
        P = np.zeros((5, 5))
        P[0, 0] = 1.0
        cum = np.cumsum(P, axis=1)
        last = np.array([0, -1, -1, -1, -1], dtype=np.int64)
        b = np.zeros(4)
        p1, c1 = _core.absorption_walks(cum, 1, b, last, 0, 50, np.uint64(1), 10)
        p2, c2 = _kernels_py.absorption_walks(cum, 1, b, last, 0, 50, 1, 10)
        assert c1.all() and c2.all()
        assert (p1 == p2).all()


class TestSelection:
    def test_backend_name_reports_selection(self):
        assert kernels.backend_name() in ("c", "py")

    def test_selected_backend_matches_module(self):
        assert kernels.BACKEND == kernels.backend_name()
