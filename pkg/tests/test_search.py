import pytest

from treebsm.analytic import Protocol, logical_bsm
from treebsm.search import (
    SearchBounds,
    enumerate_trees,
    evaluate_all,
    front_to_csv,
    pareto_front,
    smallest_error_correcting,
)
from treebsm.trees import ChannelParams, photon_count

LOOSE = dict(min_branch=1, min_depth=1, monotone=False)


class TestEnumerate:
    def test_depth_one(self):
        got = list(enumerate_trees(SearchBounds(1, 3, 10, **LOOSE)))
        assert [t.branches for t in got] == [(1,), (2,), (3,)]

    def test_depth_two_with_photon_cap(self):
        got = list(enumerate_trees(SearchBounds(2, 2, 7, **LOOSE)))
        assert [t.branches for t in got] == [
            (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)
        ]

    def test_count_matches_independent_counter(self):
        bounds = SearchBounds(3, 15, 691, **LOOSE)

        def count(prefix_product, depth_left, budget):
            total = 0
            for nxt in range(1, 16):
                cost = prefix_product * nxt
                if cost > budget:
                    break
                total += 1
                if depth_left > 1:
                    total += count(cost, depth_left - 1, budget - cost)
            return total

        assert len(list(enumerate_trees(bounds))) == count(1, 3, 690)

    def test_default_bounds_shape(self):
        got = list(enumerate_trees(SearchBounds()))
        assert all(t.depth >= 2 for t in got)
        assert all(min(t.branches) >= 2 for t in got)
        assert all(
            all(a >= b for a, b in zip(t.branches, t.branches[1:])) for t in got
        )
        assert all(photon_count(t) <= 2000 for t in got)

    def test_bad_bounds_rejected(self):
        with pytest.raises(ValueError):
            SearchBounds(max_depth=0)
        with pytest.raises(ValueError):
            SearchBounds(min_branch=5, max_branch=4)


class TestFront:
    def test_milestone_entries_at_reference_point(self):
        params = ChannelParams(eta=0.95, eps=1e-5)
        dyn = pareto_front(SearchBounds(max_depth=3, max_branch=20, max_photons=700),
                           params, Protocol.DYNAMIC)
        ec = [e for e in dyn if e.error_correcting]
        assert ec and ec[0].n_photons == 691 and ec[0].b.branches == (15, 15, 2)

        stat = pareto_front(SearchBounds(max_depth=3, max_branch=80, max_photons=1300),
                            params, Protocol.STATIC)
        ec = [e for e in stat if e.error_correcting]
        assert ec and ec[0].n_photons == 1185 and ec[0].b.branches == (74, 15)

    def test_smallest_tree_beats_physical_pairs(self):
        params = ChannelParams(eta=0.95, eps=1e-5)
        front = pareto_front(SearchBounds(max_photons=100), params, Protocol.DYNAMIC)
        first = front[0]
        assert first.n_photons == 7 and first.b.branches == (2, 2)
        assert first.beats_physical and not first.loss_tolerant

    def test_flags_recompute_from_engine(self):
        params = ChannelParams(eta=0.9, eps=1e-4)
        front = pareto_front(SearchBounds(max_photons=150), params, Protocol.STATIC)
        for e in front:
            res = logical_bsm(e.b, params, Protocol.STATIC)
            assert e.pr_complete == res.pr_complete
            assert e.err_complete == res.err_complete
            assert e.loss_tolerant == (res.pr_complete > params.eta**2)
            assert e.error_correcting == (res.err_complete < params.eps_bsm)

    def test_front_is_mutually_non_dominated(self):
        params = ChannelParams(eta=0.9, eps=1e-4)
        front = pareto_front(SearchBounds(max_photons=200), params, Protocol.DYNAMIC)
        for i, a in enumerate(front):
            for b in front[i + 1:]:
                # the later (larger) entry must beat a in some axis
                assert b.pr_complete > a.pr_complete or b.err_complete < a.err_complete

    def test_success_improvers_are_monotone(self):
        params = ChannelParams(eta=0.9, eps=1e-4)
        front = pareto_front(SearchBounds(max_photons=300), params, Protocol.DYNAMIC)
        prs = [e.pr_complete for e in front if e.improves_success]
        assert all(a < b for a, b in zip(prs, prs[1:]))

    def test_lossless_error_front_is_success_staircase(self):
        params = ChannelParams(eta=0.85, eps=0.0)
        front = pareto_front(SearchBounds(max_photons=200), params, Protocol.STATIC)
        prs = [e.pr_complete for e in front]
        assert prs == sorted(prs)
        assert all(e.improves_success for e in front)

    def test_empty_front_possible_only_with_empty_bounds(self):
        params = ChannelParams(eta=0.5, eps=0.0)
        front = pareto_front(SearchBounds(max_photons=7), params, Protocol.STATIC)
        assert [e.b.branches for e in front] == [(2, 2)]


class TestHelpers:
    def test_smallest_error_correcting_none_below_threshold(self):
        params = ChannelParams(eta=0.95, eps=1e-5)
        assert smallest_error_correcting(
            SearchBounds(max_photons=100), params, Protocol.STATIC
        ) is None

    def test_csv_schema(self):
        params = ChannelParams(eta=0.95, eps=1e-5)
        front = pareto_front(SearchBounds(max_photons=20), params, Protocol.DYNAMIC)
        text = front_to_csv(front)
        header = text.splitlines()[0]
        assert header == (
            "b,n,protocol,eta,eps,pr_complete,err_complete,"
            "loss_tolerant,error_correcting"
        )
        first = text.splitlines()[1]
        assert first.startswith('"2,2",7,dynamic,')

    def test_evaluate_all_sorted_by_photon_count(self):
        params = ChannelParams(eta=0.9, eps=0.0)
        entries = evaluate_all(SearchBounds(max_photons=60), params, Protocol.STATIC)
        ns = [e.n_photons for e in entries]
        assert ns == sorted(ns)
