import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthcert import bounds
from depthcert.bounds import PartitionSpec, p_ent, p_sep, partition_bound
from depthcert.certify import (InconsistentObservation, certify, default_partitions, sweep)


class TestCertify:
    def test_two_party_example(self):
        v = certify(2, 0.25, 0.72)
        assert [p.group_sizes for p, _ in v.excluded_partitions] == [(1, 1)]
        assert v.excluded_partitions[0][1] == pytest.approx(0.706650423101045, abs=1e-12)
        assert v.depth_lower_bound == 2
        assert v.gme

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_guessing_certifies_nothing(self, n):
        v = certify(n, 0.4, 2.0**-n)
        assert v.excluded_partitions == ()
        assert v.depth_lower_bound == 1
        assert not v.gme

    def test_just_above_one_three_cut(self):
        b = partition_bound(0.5, PartitionSpec((1, 3))).value
        v = certify(4, 0.5, b + 1e-9)
        assert v.gme and v.depth_lower_bound == 4
        nontrivial = [p for p in bounds.partitions(4) if p.m > 1]
        assert {p for p, _ in v.excluded_partitions} == set(nontrivial)

    def test_depth_between(self):
        # beats every cut with groups of at most two, but not the 1|3 cut
        b22 = partition_bound(0.5, PartitionSpec((2, 2))).value
        v = certify(4, 0.5, b22 + 1e-6)
        assert v.depth_lower_bound == 3
        assert not v.gme

    def test_no_false_exclusion(self):
        for sizes in [(1, 3), (2, 2), (1, 1, 2)]:
            b = bounds._cached_partition_value(0.5, sizes)
            v = certify(4, 0.5, b)
            assert PartitionSpec(sizes) not in {p for p, _ in v.excluded_partitions}

    def test_margin(self):
        assert certify(2, 0.25, 0.72, margin=0.02).excluded_partitions == ()
        with pytest.raises(ValueError):
            certify(2, 0.25, 0.72, margin=-1)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_quantum_maximum_is_gme(self, n):
        for omega in np.linspace(0.05, 1 - 2.0**-n - 0.05, 6):
            assert certify(n, float(omega), p_ent(float(omega), n)).gme

    def test_inconsistent(self):
        with pytest.raises(InconsistentObservation):
            certify(2, 0.25, 0.76)
        # within the tolerance
        certify(2, 0.25, 0.75 + 5e-10)

    @pytest.mark.parametrize("args", [(1, 0.3, 0.5), (2, 1.3, 0.5), (2, 0.3, 1.5), (13, 0.3, 0.01)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            certify(*args)

    def test_to_dict(self):
        d = certify(2, 0.25, 0.72).to_dict()
        assert set(d) == {"n", "omega", "observed_ps", "excluded_partitions",
                          "depth_lower_bound", "gme"}
        assert d["excluded_partitions"][0]["partition"] == [1, 1]
        assert d["excluded_partitions"][0]["label"] == "1|1"

    @settings(max_examples=60, deadline=None)
    @given(omega=st.floats(0.0, 0.9375), f1=st.floats(0, 1), f2=st.floats(0, 1))
    def test_monotone_in_observation(self, omega, f1, f2):
        lo_ps, hi_ps = sorted([f1, f2])
        top = p_ent(omega, 4)
        a = certify(4, omega, 1 / 16 + lo_ps * (top - 1 / 16))
        b = certify(4, omega, 1 / 16 + hi_ps * (top - 1 / 16))
        assert {p for p, _ in a.excluded_partitions} <= {p for p, _ in b.excluded_partitions}
        assert a.depth_lower_bound <= b.depth_lower_bound


class TestSweep:
    def test_two_party(self):
        curves = sweep(2, [0.0, 0.25, 0.75])
        assert [c.name for c in curves] == ["p_ent", "p_sep"]
        np.testing.assert_allclose(curves[0].values, [0.25, 0.75, 1.0], atol=1e-15)
        np.testing.assert_allclose(curves[1].values, [0.25, 0.706650423101045, 1.0], atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_start_at_guessing(self, n):
        for c in sweep(n, [0.0]):
            assert c.values[0] == pytest.approx(2.0**-n, abs=1e-15)

    def test_four_party_order(self):
        grid = np.linspace(0, 15 / 16, 20)
        curves = sweep(4, grid)
        assert [c.name for c in curves] == ["p_ent", "p_{1|3}", "p_{2|2}", "p_{1|1|2}", "p_sep"]
        vals = np.array([c.values for c in curves])
        assert np.all(np.diff(vals, axis=0) <= 1e-10)

    def test_default_partitions(self):
        assert [p.label() for p in default_partitions(4)] == ["1|3", "2|2", "1|1|2"]

    def test_errors(self):
        with pytest.raises(ValueError):
            sweep(13, [0.1])
        with pytest.raises(ValueError):
            sweep(3, [1.2])
        with pytest.raises(ValueError):
            sweep(4, [0.1], [PartitionSpec((1, 2))])
