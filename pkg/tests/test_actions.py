import math
import random

import numpy as np
import pytest

from l1comb import (
    ActionError,
    QuasiTreeKernelInput,
    ball,
    displacement_excess,
    free_reduce,
    invert,
    op_norm_lower_bound,
    orbit_growth_report,
    orbit_kernel,
    parse_action,
    parse_quasitree_csv,
    validate_quasitree_kernel,
)
from l1comb.espace import OpNormConfig

IDENTITY_ACTION = "target_rank: 2\na -> a\nb -> b\n"
PROJECTION_ACTION = """\
# kill the second factor
target_rank: 2
a -> a
b -> b
c -> e
d -> e
"""


class TestParseAction:
    def test_identity_accepted(self, f2):
        action = parse_action(IDENTITY_ACTION, f2)
        assert action.apply("abAB") == "abAB"

    def test_projection_accepted(self, f2xf2):
        action = parse_action(PROJECTION_ACTION, f2xf2)
        # commutator relators map to freely trivial words
        for rel in f2xf2.relators:
            assert free_reduce(action.apply(rel)) == ""
        assert action.apply("cad") == "a"

    def test_non_homomorphism_rejected_with_relator(self, f2xf2):
        bad = "target_rank: 2\na -> a\nb -> b\nc -> ab\nd -> e\n"
        with pytest.raises(ActionError, match="acAC"):
            parse_action(bad, f2xf2)

    def test_missing_image_rejected(self, f2):
        with pytest.raises(ActionError, match="no image"):
            parse_action("target_rank: 1\na -> a\n", f2)

    def test_bad_target_letter_rejected(self, f2):
        with pytest.raises(ActionError, match="target alphabet"):
            parse_action("target_rank: 1\na -> a\nb -> b\n", f2)

    def test_homomorphism_property_sampled(self, f2xf2, f2xf2_ball3):
        action = parse_action(PROJECTION_ACTION, f2xf2)
        rng = random.Random(51)
        words = f2xf2_ball3.elements
        for _ in range(40):
            s = words[rng.randrange(len(words))]
            t = words[rng.randrange(len(words))]
            st = f2xf2_ball3.mul(s, t)
            assert action.apply(st) == free_reduce(action.apply(s) + action.apply(t))


class TestOrbitKernel:
    def test_identity_action_reproduces_tree_kernel(self, f2, f2_ball4, tree_kernel):
        action = parse_action(IDENTITY_ACTION, f2)
        kernel = orbit_kernel(action, f2_ball4)
        assert np.array_equal(kernel.values, tree_kernel.values)
        assert kernel.displacement_constant == 0.0
        assert kernel.provenance == "tree_action"

    def test_projection_kernel_values(self, f2xf2, f2xf2_ball3):
        action = parse_action(PROJECTION_ACTION, f2xf2)
        kernel = orbit_kernel(action, f2xf2_ball3)
        for n in (1, 2, 3):
            assert kernel.value(kernel.index_of("a" * n), 0) == n
            assert kernel.value(kernel.index_of("c" * n), 0) == 0

    def test_left_invariance(self, f2xf2, f2xf2_ball3):
        action = parse_action(PROJECTION_ACTION, f2xf2)
        kernel = orbit_kernel(action, f2xf2_ball3)
        rng = random.Random(52)
        inner = f2xf2_ball3.size_within(1)
        words = f2xf2_ball3.elements
        for _ in range(30):
            s = words[rng.randrange(inner)]
            i = rng.randrange(f2xf2_ball3.size_within(2))
            j = rng.randrange(f2xf2_ball3.size_within(2))
            si = f2xf2_ball3.canonical_index(s + words[i])
            sj = f2xf2_ball3.canonical_index(s + words[j])
            assert kernel.value(si, sj) == kernel.value(i, j)

    def test_zero_excess_and_isometric_opnorm(self, f2, f2_ball4):
        action = parse_action(IDENTITY_ACTION, f2)
        kernel = orbit_kernel(action, f2_ball4)
        config = OpNormConfig(restarts=4, iterations=100, seed=6)
        for s in ("a", "bA"):
            assert displacement_excess(kernel, s, f2_ball4.indices_within(2)) == 0.0
            assert op_norm_lower_bound(s, kernel, 2, config).value <= 1 + 1e-9


def _tree_kernel_input(cayley_ball, radius, delta=0.0):
    words = cayley_ball.elements[: cayley_ball.size_within(radius)]
    distances = {}
    values = {}
    for i, x in enumerate(words):
        for y in words[i + 1:]:
            d = len(free_reduce(invert(x) + y))
            key = (x, y) if x <= y else (y, x)
            distances[key] = float(d)
            values[key] = float(d)
    return QuasiTreeKernelInput(tuple(words), distances, values, delta)


class TestQuasiTreeValidation:
    def test_exact_tree_kernel_accepted(self, f2_ball4):
        report = validate_quasitree_kernel(_tree_kernel_input(f2_ball4, 2))
        assert report.passed
        assert report.min_eigenvalue >= -1e-9

    def test_upper_bound_violation_names_pair(self, f2_ball4):
        data = _tree_kernel_input(f2_ball4, 2)
        key = ("a", "b")
        data.kernel_values[key] += 0.5
        report = validate_quasitree_kernel(data)
        assert not report.passed
        assert any("'a'" in f and "'b'" in f and "upper" in f for f in report.failures)

    def test_truncated_kernel_decided_by_eigencheck(self, f2):
        # K = max(d - 1, 0) with delta = 1 on a six-point path
        labels = tuple(f"p{i}" for i in range(6))
        distances = {}
        values = {}
        for i in range(6):
            for j in range(i + 1, 6):
                key = (labels[i], labels[j])
                distances[key] = float(j - i)
                values[key] = float(max(j - i - 1, 0))
        data = QuasiTreeKernelInput(labels, distances, values, 1.0)
        report = validate_quasitree_kernel(data)
        # independent eigen decision
        mat = np.zeros((6, 6))
        for i in range(6):
            for j in range(6):
                if i != j:
                    mat[i, j] = max(abs(i - j) - 1, 0)
        ones = np.ones(6) / math.sqrt(6)
        proj = np.eye(6) - np.outer(ones, ones)
        centered = proj @ (-0.5 * mat) @ proj
        eigs = np.linalg.eigvalsh(centered)
        expected_pass = eigs.min() >= -1e-9
        assert report.passed == expected_pass

    def test_displacement_bound_checked_when_translates_supplied(self, f2_ball4):
        data = _tree_kernel_input(f2_ball4, 2)
        words = set(data.labels)
        table = {
            x: free_reduce("a" + x)
            for x in data.labels
            if free_reduce("a" + x) in words
        }
        report = validate_quasitree_kernel(data, translations=[table])
        assert report.passed and report.displacement_checked

    def test_declared_delta_recorded_without_translates(self, f2_ball4):
        report = validate_quasitree_kernel(_tree_kernel_input(f2_ball4, 2, delta=0.25))
        assert report.delta == 0.25
        assert not report.displacement_checked


class TestQuasiTreeParsing:
    def test_round_trip(self):
        text = "delta: 0.5\nx,y,d,K\ne,a,1,0.75\ne,b,1,1\na,b,2,1.5\n"
        data = parse_quasitree_csv(text)
        assert data.delta == 0.5
        assert data.labels == ("e", "a", "b")
        assert data.kernel_values[("a", "e")] == 0.75

    def test_missing_pair_rejected(self):
        with pytest.raises(ActionError, match="missing kernel row"):
            parse_quasitree_csv("delta: 0\nx,y,d,K\ne,a,1,1\ne,b,1,1\n")

    def test_missing_delta_rejected(self):
        with pytest.raises(ActionError, match="delta"):
            parse_quasitree_csv("x,y,d,K\ne,a,1,1\n")


class TestGrowthReport:
    def test_identity_action_grows_like_sqrt(self, f2, f2_ball4):
        action = parse_action(IDENTITY_ACTION, f2)
        kernel = orbit_kernel(action, f2_ball4)
        growth = orbit_growth_report(kernel)
        assert growth.verdict == "unbounded on scanned range"
        assert abs(growth.fitted_constant - 1.0) < 1e-9
        for n, value in growth.sphere_maxima.items():
            assert abs(value - (math.sqrt(n) + 2.0)) < 1e-9

    def test_trivially_acting_factor_is_bounded(self, f2xf2, f2xf2_ball3):
        action = parse_action(PROJECTION_ACTION, f2xf2)
        kernel = orbit_kernel(action, f2xf2_ball3)
        second_factor = lambda w: w and all(ch in "cCdD" for ch in w)
        growth = orbit_growth_report(kernel, element_filter=second_factor)
        assert growth.verdict == "bounded on scanned range"
        assert all(row.norm_e == 2.0 for row in growth.norm_report.rows)

    def test_full_ball_is_unbounded_through_first_factor(self, f2xf2, f2xf2_ball3):
        action = parse_action(PROJECTION_ACTION, f2xf2)
        kernel = orbit_kernel(action, f2xf2_ball3)
        growth = orbit_growth_report(kernel)
        assert growth.verdict == "unbounded on scanned range"
        assert growth.fitted_constant > 0
