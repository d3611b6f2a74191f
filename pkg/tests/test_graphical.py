from __future__ import annotations

import io
import itertools

import numpy as np
import pytest

from fvqsd import (
    AbsorbingChain,
    MarkRealization,
    ReplicaSeed,
    evolve,
    influence_experiment,
    influence_matrix,
    influence_sets,
    load_marks,
    sample_marks,
    save_marks,
    simulate,
    transition_tables,
)

from _oracles import occupancy_law


def ref_influence(marks, root, t_start=0.0):
    # Straight-line reference for the backward membership scan.
    member = {int(root)}
    for e in range(marks.voter_times.size - 1, -1, -1):
        if marks.voter_times[e] < t_start:
            break
        if int(marks.voter_particle[e]) in member:
            member.add(int(marks.voter_targets[e]))
    return frozenset(member)


def hand_marks(n_particles=2, n_states=2, internal=(), voter=(), horizon=1.0):
    """Build a MarkRealization from explicit event tuples.

    internal: (time, particle, map_row); voter: (time, particle, target,
    field_row).
    """
    it = np.array([e[0] for e in internal], dtype=np.float64)
    ip = np.array([e[1] for e in internal], dtype=np.int64)
    im = np.array([e[2] for e in internal], dtype=np.int64).reshape(len(internal), n_states)
    vt = np.array([e[0] for e in voter], dtype=np.float64)
    vp = np.array([e[1] for e in voter], dtype=np.int64)
    vg = np.array([e[2] for e in voter], dtype=np.int64)
    vf = np.array([e[3] for e in voter], dtype=np.bool_).reshape(len(voter), n_states)
    return MarkRealization(
        horizon=horizon, n_particles=n_particles, n_states=n_states,
        internal_times=it, internal_particle=ip, internal_maps=im,
        voter_times=vt, voter_particle=vp, voter_targets=vg, voter_fields=vf,
    )


class TestSampleMarks:
    def test_validation(self, golden_chain):
        with pytest.raises(ValueError):
            sample_marks(golden_chain, 1, 1.0, 0)
        with pytest.raises(ValueError):
            sample_marks(golden_chain, 3, -1.0, 0)
        with pytest.raises(ValueError):
            sample_marks(golden_chain, 3, np.inf, 0)

    def test_horizon_zero_empty(self, golden_chain):
        marks = sample_marks(golden_chain, 5, 0.0, 0)
        assert marks.n_events == 0

    def test_deterministic(self, golden_chain):
        a = sample_marks(golden_chain, 6, 2.0, ReplicaSeed(12, 4))
        b = sample_marks(golden_chain, 6, 2.0, ReplicaSeed(12, 4))
        np.testing.assert_array_equal(a.internal_times, b.internal_times)
        np.testing.assert_array_equal(a.voter_fields, b.voter_fields)

    def test_times_distinct_and_in_range(self, golden_chain):
        marks = sample_marks(golden_chain, 20, 5.0, 3)
        times = np.concatenate([marks.internal_times, marks.voter_times])
        assert np.unique(times).size == times.size
        assert (times >= 0).all() and (times <= 5.0).all()

    def test_golden_fields_are_degenerate(self, golden_chain):
        # absorption = (1, 0) and C = 1: the indicator always fires at
        # site 0 and never at site 1.
        marks = sample_marks(golden_chain, 10, 4.0, 9)
        assert marks.voter_fields[:, 0].all()
        assert not marks.voter_fields[:, 1].any()

    def test_golden_maps_swap(self, golden_chain):
        # Unit-rate two-site chain: every internal map is the swap.
        marks = sample_marks(golden_chain, 10, 4.0, 9)
        assert (marks.internal_maps[:, 0] == 1).all()
        assert (marks.internal_maps[:, 1] == 0).all()

    def test_maps_follow_jump_kernel(self, three_site_chain):
        # Row a of the kernel is (1/3, 2/3, 0): site c never drawn, and
        # the a/b split matches the kernel within Monte Carlo error.
        n_events = 0
        hits_b = 0
        for r in range(40):
            marks = sample_marks(three_site_chain, 8, 3.0, ReplicaSeed(21, r))
            f_a = marks.internal_maps[:, 0]
            assert (f_a != 2).all()
            n_events += f_a.size
            hits_b += int((f_a == 1).sum())
        frac = hits_b / n_events
        se = np.sqrt(2.0 / 9.0 / n_events)
        assert abs(frac - 2.0 / 3.0) < 5 * se

    def test_event_counts_poisson(self, golden_chain):
        # Mean internal and copy counts are N * rate * horizon.
        n, t, reps = 7, 1.5, 300
        internals = np.empty(reps)
        voters = np.empty(reps)
        for r in range(reps):
            marks = sample_marks(golden_chain, n, t, ReplicaSeed(1000, r))
            internals[r] = marks.internal_times.size
            voters[r] = marks.voter_times.size
        expect = n * 1.0 * t
        for counts in (internals, voters):
            se = counts.std(ddof=1) / np.sqrt(reps)
            assert abs(counts.mean() - expect) < 4 * se

    def test_voter_targets_never_self(self, golden_chain):
        marks = sample_marks(golden_chain, 4, 6.0, 2)
        assert (marks.voter_targets != marks.voter_particle).all()

    def test_zero_absorption_no_voter_events(self):
        chain = AbsorbingChain(
            states=("1", "2"),
            rates=np.array([[0.0, 1.0], [1.0, 0.0]]),
            absorption=np.zeros(2),
        )
        marks = sample_marks(chain, 5, 3.0, 0)
        assert marks.voter_times.size == 0
        assert marks.internal_times.size > 0


class TestEvolve:
    def test_no_events_identity(self, golden_chain):
        marks = sample_marks(golden_chain, 4, 0.0, 0)
        xi0 = np.array([0, 1, 1, 0])
        np.testing.assert_array_equal(evolve(xi0, marks), xi0)

    def test_single_internal_event(self):
        marks = hand_marks(internal=[(0.5, 0, [1, 0])])
        np.testing.assert_array_equal(evolve([0, 0], marks), [1, 0])
        np.testing.assert_array_equal(evolve([1, 1], marks), [0, 1])

    def test_voter_event_fires_by_site(self):
        # Field set only at site 0: the copy happens iff particle 0 sits
        # at site 0 when the event arrives.
        marks = hand_marks(voter=[(0.5, 0, 1, [True, False])])
        np.testing.assert_array_equal(evolve([0, 1], marks), [1, 1])
        np.testing.assert_array_equal(evolve([1, 0], marks), [1, 0])

    def test_merged_order(self):
        # Internal swap at t=0.3 puts particle 0 on site 0; the later
        # copy event then fires and drags it onto particle 1.
        marks = hand_marks(
            internal=[(0.3, 0, [0, 0])],
            voter=[(0.7, 0, 1, [True, False])],
        )
        np.testing.assert_array_equal(evolve([1, 1], marks), [1, 1])
        # Reversed times: the copy attempt comes first and misses.
        marks2 = hand_marks(
            internal=[(0.7, 0, [0, 0])],
            voter=[(0.3, 0, 1, [True, False])],
        )
        np.testing.assert_array_equal(evolve([1, 1], marks2), [0, 1])

    def test_size_mismatch(self, golden_chain):
        marks = sample_marks(golden_chain, 4, 1.0, 0)
        with pytest.raises(ValueError):
            evolve([0, 1], marks)

    def test_law_matches_event_driven_simulator(self, golden_chain):
        # The two samplers are independent implementations of the same
        # process; compare site-0 count laws and the exact reference.
        n, t, reps = 3, 0.5, 4000
        tables = transition_tables(golden_chain)
        xi0 = np.zeros(n, dtype=np.int64)
        law_sim = np.zeros(n + 1)
        law_marks = np.zeros(n + 1)
        for r in range(reps):
            pos = simulate(golden_chain, xi0, t, ReplicaSeed(42, r), tables)
            law_sim[int((pos == 0).sum())] += 1
            marks = sample_marks(golden_chain, n, t, ReplicaSeed(77777, r))
            law_marks[int((evolve(xi0, marks) == 0).sum())] += 1
        law_sim /= reps
        law_marks /= reps
        ref = occupancy_law(golden_chain, n, n, t)
        assert np.abs(law_sim - law_marks).sum() < 0.06
        assert np.abs(law_marks - ref).sum() < 0.06


class TestInfluence:
    def test_root_always_member(self, golden_chain):
        marks = sample_marks(golden_chain, 8, 2.0, 5)
        for i, s in enumerate(influence_sets(marks)):
            assert i in s

    def test_no_voter_events_singleton(self):
        chain = AbsorbingChain(
            states=("1", "2"),
            rates=np.array([[0.0, 1.0], [1.0, 0.0]]),
            absorption=np.zeros(2),
        )
        marks = sample_marks(chain, 5, 2.0, 0)
        assert influence_sets(marks) == [frozenset({i}) for i in range(5)]

    def test_window_zero_singleton(self, golden_chain):
        marks = sample_marks(golden_chain, 6, 2.0, 1)
        assert influence_sets(marks, window=0.0) == [
            frozenset({i}) for i in range(6)
        ]

    def test_window_monotone(self, golden_chain):
        marks = sample_marks(golden_chain, 10, 3.0, 8)
        small = influence_sets(marks, window=1.0)
        large = influence_sets(marks, window=3.0)
        for s, l in zip(small, large):
            assert s <= l

    def test_matches_reference_scan(self, golden_chain):
        for r in range(30):
            marks = sample_marks(golden_chain, 6, 2.0, ReplicaSeed(64, r))
            got = influence_sets(marks)
            for i in range(6):
                assert got[i] == ref_influence(marks, i)

    def test_membership_ignores_field(self):
        # The copy attempt could not fire (field all False), yet the
        # target still joins: membership tracks what could matter.
        marks = hand_marks(voter=[(0.5, 0, 1, [False, False])])
        assert influence_sets(marks)[0] == frozenset({0, 1})

    def test_roots_selection(self, golden_chain):
        marks = sample_marks(golden_chain, 9, 2.0, 15)
        full = influence_matrix(marks)
        sub = influence_matrix(marks, roots=np.array([2, 5]))
        np.testing.assert_array_equal(sub[0], full[2])
        np.testing.assert_array_equal(sub[1], full[5])
        with pytest.raises(ValueError):
            influence_matrix(marks, roots=np.array([11]))

    def test_window_validation(self, golden_chain):
        marks = sample_marks(golden_chain, 4, 1.0, 0)
        with pytest.raises(ValueError):
            influence_matrix(marks, window=2.0)


class TestCoupling:
    def test_outside_perturbations_never_matter(self, golden_chain):
        # For every realization and root: changing initial coordinates
        # outside the influence set never moves the root's endpoint;
        # at least one inside perturbation must matter somewhere.
        n = 5
        rng = np.random.default_rng(2718)
        nontrivial = 0
        inside_matters = 0
        for r in range(100):
            marks = sample_marks(golden_chain, n, 1.0, ReplicaSeed(31337, r))
            xi0 = rng.integers(0, 2, size=n)
            base = evolve(xi0, marks)
            sets = influence_sets(marks)
            for i in range(n):
                outside = [j for j in range(n) if j not in sets[i]]
                nontrivial += bool(outside)
                for k in range(1, len(outside) + 1):
                    for combo in itertools.combinations(outside, k):
                        perturbed = xi0.copy()
                        perturbed[list(combo)] = 1 - perturbed[list(combo)]
                        assert evolve(perturbed, marks)[i] == base[i]
                for j in sets[i]:
                    perturbed = xi0.copy()
                    perturbed[j] = 1 - perturbed[j]
                    if evolve(perturbed, marks)[i] != base[i]:
                        inside_matters += 1
        assert nontrivial > 50  # the check is not vacuous
        assert inside_matters > 0


class TestInfluenceExperiment:
    def test_bounds_and_ci(self, golden_chain):
        size, overlap = influence_experiment(
            golden_chain, 41, 0.25, replicas=400, seed=5
        )
        assert size.mean_size <= size.bound + 3 * size.std_error
        assert overlap.probability <= overlap.bound + 3 * overlap.std_error
        assert 0.0 <= overlap.ci_low <= overlap.probability <= overlap.ci_high <= 1.0
        assert size.bound == pytest.approx(np.exp(0.25))
        assert overlap.bound == pytest.approx((np.exp(0.5) - 1.0) / 40.0)

    def test_threads_equivalent(self, golden_chain):
        a = influence_experiment(golden_chain, 21, 0.25, replicas=60, seed=9)
        b = influence_experiment(golden_chain, 21, 0.25, replicas=60, seed=9,
                                 threads=3)
        assert a == b


class TestPersistence:
    def test_roundtrip_bitwise(self, golden_chain, tmp_path):
        marks = sample_marks(golden_chain, 7, 2.5, 123)
        path = tmp_path / "marks.bin"
        save_marks(marks, path)
        back = load_marks(path)
        for name in (
            "internal_times", "internal_particle", "internal_maps",
            "voter_times", "voter_particle", "voter_targets", "voter_fields",
        ):
            np.testing.assert_array_equal(getattr(marks, name), getattr(back, name))
        assert back.horizon == marks.horizon
        assert back.n_particles == marks.n_particles
        # Replay agrees exactly.
        xi0 = np.zeros(7, dtype=np.int64)
        np.testing.assert_array_equal(evolve(xi0, marks), evolve(xi0, back))

    def test_file_object(self, golden_chain):
        marks = sample_marks(golden_chain, 3, 1.0, 5)
        buf = io.BytesIO()
        save_marks(marks, buf)
        buf.seek(0)
        back = load_marks(buf)
        np.testing.assert_array_equal(back.voter_targets, marks.voter_targets)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTMARKS" + b"\x00" * 48)
        with pytest.raises(ValueError, match="magic"):
            load_marks(path)

    def test_trailing_bytes(self, golden_chain, tmp_path):
        marks = sample_marks(golden_chain, 3, 1.0, 5)
        path = tmp_path / "padded.bin"
        with open(path, "wb") as fh:
            save_marks(marks, fh)
            fh.write(b"xx")
        with pytest.raises(ValueError):
            load_marks(path)
