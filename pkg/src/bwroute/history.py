"""Online routing statistics: request frequencies and link usage counts."""

from __future__ import annotations

from typing import Sequence

import numpy as np


class RoutingHistory:
    """Counts gathered while demands are processed.

    ``request_counts`` feed the pair probabilities, Laplace-smoothed so they
    are defined before the first request. ``link_paths`` / ``total_paths``
    count established paths; by default they are never decremented when a
    reservation expires (set ``active_only=True`` to count live paths only).
    """

    def __init__(self, pairs: Sequence[tuple[int, int]], n_links: int, active_only: bool = False):
        self.pairs = [tuple(p) for p in pairs]
        self._index = {p: i for i, p in enumerate(self.pairs)}
        self.request_counts = np.zeros(len(self.pairs), dtype=np.int64)
        self.total_requests = 0
        self.link_paths = np.zeros(n_links, dtype=np.int64)
        self.total_paths = 0
        self.active_only = active_only

    def index(self, pair: tuple[int, int]) -> int:
        return self._index[tuple(pair)]

    def record_request(self, pair: tuple[int, int]) -> None:
        self.request_counts[self._index[tuple(pair)]] += 1
        self.total_requests += 1

    def forget_request(self, pair: tuple[int, int]) -> None:
        i = self._index[tuple(pair)]
        if self.request_counts[i] == 0:
            raise ValueError(f"no request recorded for {pair}")
        self.request_counts[i] -= 1
        self.total_requests -= 1

    def record_established(self, path: Sequence[int]) -> None:
        self.total_paths += 1
        for lid in path:
            self.link_paths[lid] += 1

    def record_released(self, path: Sequence[int]) -> None:
        if not self.active_only:
            return
        self.total_paths -= 1
        for lid in path:
            self.link_paths[lid] -= 1

    def probabilities(self) -> np.ndarray:
        return (self.request_counts + 1) / (self.total_requests + len(self.pairs))

    def prob(self, pair: tuple[int, int]) -> float:
        return float(self.probabilities()[self._index[tuple(pair)]])

    def check_invariants(self) -> None:
        assert int(self.request_counts.sum()) == self.total_requests
        assert self.total_paths >= 0
        assert (self.link_paths >= 0).all() and (self.link_paths <= self.total_paths).all()
