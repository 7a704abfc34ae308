"""Tests for the ordered worker pool."""

import time

from weylspec.sweep import ordered_mapper, parallel_map


class TestParallelMap:
    def test_inline(self):
        assert parallel_map(lambda v: v * v, range(5)) == [0, 1, 4, 9, 16]

    def test_threads_keep_order(self):
        def slow(v):
            time.sleep(0.01 * (5 - v))
            return v

        assert parallel_map(slow, range(5), threads=4) == [0, 1, 2, 3, 4]

    def test_empty(self):
        assert parallel_map(str, [], threads=2) == []

    def test_progress_bar_does_not_change_results(self):
        assert parallel_map(abs, [-2, 3], quiet=False, desc="test") == [2, 3]


class TestOrderedMapper:
    def test_map_like(self):
        mapper = ordered_mapper(threads=2)
        assert mapper(lambda v: v + 1, [1, 2, 3]) == [2, 3, 4]
