"""Uniform hash grid over node positions for Nearest/Near queries."""

import math
from collections import defaultdict
from typing import Callable, Dict, List, Optional, Set, Tuple

Position = Tuple[float, float, float]


class SpatialHashIndex:
    """Buckets keys by (x, y); distances are Euclidean over (x, y, z)."""

    def __init__(self, bucket_size: float) -> None:
        if bucket_size <= 0.0:
            raise ValueError("bucket_size must be positive")
        self.bucket_size = bucket_size
        self.hash_table: Dict[Tuple[int, int], Set[int]] = defaultdict(set)
        self.positions: Dict[int, Position] = {}

    def _bucket(self, x: float, y: float) -> Tuple[int, int]:
        return int(math.floor(x / self.bucket_size)), int(math.floor(y / self.bucket_size))

    def __len__(self) -> int:
        return len(self.positions)

    def __contains__(self, key: int) -> bool:
        return key in self.positions

    def insert(self, key: int, x: float, y: float, z: float) -> None:
        if key in self.positions:
            self.remove(key)
        self.positions[key] = (x, y, z)
        self.hash_table[self._bucket(x, y)].add(key)

    def remove(self, key: int) -> None:
        x, y, _ = self.positions.pop(key)
        bucket = self._bucket(x, y)
        members = self.hash_table[bucket]
        members.discard(key)
        if not members:
            del self.hash_table[bucket]

    def clear(self) -> None:
        self.hash_table.clear()
        self.positions.clear()

    def _distance(self, key: int, x: float, y: float, z: float) -> float:
        px, py, pz = self.positions[key]
        return math.sqrt((px - x) ** 2 + (py - y) ** 2 + (pz - z) ** 2)

    def near(
        self,
        x: float,
        y: float,
        z: float,
        radius: float,
        predicate: Optional[Callable[[int], bool]] = None,
    ) -> List[int]:
        """Keys within ``radius`` sorted by distance, then key."""
        i0, j0 = self._bucket(x - radius, y - radius)
        i1, j1 = self._bucket(x + radius, y + radius)
        hits = []
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                for key in self.hash_table.get((i, j), ()):
                    if predicate is not None and not predicate(key):
                        continue
                    d = self._distance(key, x, y, z)
                    if d <= radius:
                        hits.append((d, key))
        hits.sort()
        return [key for _, key in hits]

    def nearest(
        self,
        x: float,
        y: float,
        z: float,
        predicate: Optional[Callable[[int], bool]] = None,
    ) -> Optional[int]:
        """Closest key passing ``predicate``; ties go to the lower key."""
        if not self.hash_table:
            return None
        ci, cj = self._bucket(x, y)
        occupied = self.hash_table.keys()
        max_ring = max(max(abs(i - ci), abs(j - cj)) for i, j in occupied)

        best: Optional[Tuple[float, int]] = None
        for ring in range(max_ring + 1):
            for i in range(ci - ring, ci + ring + 1):
                for j in range(cj - ring, cj + ring + 1):
                    if max(abs(i - ci), abs(j - cj)) != ring:
                        continue
                    for key in self.hash_table.get((i, j), ()):
                        if predicate is not None and not predicate(key):
                            continue
                        candidate = (self._distance(key, x, y, z), key)
                        if best is None or candidate < best:
                            best = candidate
            if best is not None and best[0] <= ring * self.bucket_size:
                break
        return None if best is None else best[1]
