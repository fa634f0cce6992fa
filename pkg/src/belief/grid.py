"""Uniform occupancy grid over the search area."""

import logging
import threading
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..models.belief import BeliefMapDocument
from .sensor import BeliefMapError, entropy_array

logger = logging.getLogger(__name__)


class BeliefMap:
    """Per-cell occupancy probabilities and priority weights.

    Cells are addressed by a single integer ``idx = row * n_cols + col``; rows
    run along y and columns along x from ``origin``. Readers may share a map
    freely; writers go through :meth:`apply` which holds the map lock.
    """

    def __init__(
        self,
        cell_size: float,
        n_rows: int,
        n_cols: int,
        origin: Tuple[float, float] = (0.0, 0.0),
        prob: Optional[np.ndarray] = None,
        priority: Optional[np.ndarray] = None,
    ) -> None:
        if cell_size <= 0.0:
            raise BeliefMapError(f"cell_size must be positive, got {cell_size}")
        if n_rows < 1 or n_cols < 1:
            raise BeliefMapError("belief map needs at least one row and one column")
        self.cell_size = float(cell_size)
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.origin = (float(origin[0]), float(origin[1]))
        n = self.n_rows * self.n_cols

        self.prob = (
            np.full(n, 0.5) if prob is None else np.array(prob, dtype=float).ravel()
        )
        self.priority = (
            np.ones(n) if priority is None else np.array(priority, dtype=float).ravel()
        )
        if self.prob.shape != (n,) or self.priority.shape != (n,):
            raise BeliefMapError(f"expected {n} cells per array")
        if np.any((self.prob < 0.0) | (self.prob > 1.0)) or np.any(np.isnan(self.prob)):
            raise BeliefMapError("probabilities must lie in [0, 1]")
        if np.any(self.priority < 0.0):
            raise BeliefMapError("priorities must be non-negative")

        cols = np.arange(n) % self.n_cols
        rows = np.arange(n) // self.n_cols
        self.center_x = self.origin[0] + (cols + 0.5) * self.cell_size
        self.center_y = self.origin[1] + (rows + 0.5) * self.cell_size
        self._lock = threading.Lock()

    @classmethod
    def uniform(
        cls,
        width: float,
        height: float,
        cell_size: float,
        p: float = 0.5,
        origin: Tuple[float, float] = (0.0, 0.0),
    ) -> "BeliefMap":
        """Map covering ``width`` x ``height`` metres at constant probability."""
        n_cols = max(1, int(np.ceil(width / cell_size - 1e-9)))
        n_rows = max(1, int(np.ceil(height / cell_size - 1e-9)))
        return cls(
            cell_size, n_rows, n_cols, origin, prob=np.full(n_rows * n_cols, p)
        )

    @property
    def n_cells(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def width(self) -> float:
        return self.n_cols * self.cell_size

    @property
    def height(self) -> float:
        return self.n_rows * self.cell_size

    def index(self, row: int, col: int) -> int:
        if not (0 <= row < self.n_rows and 0 <= col < self.n_cols):
            raise BeliefMapError(f"cell ({row}, {col}) outside grid")
        return row * self.n_cols + col

    def row_col(self, idx: int) -> Tuple[int, int]:
        if not (0 <= idx < self.n_cells):
            raise BeliefMapError(f"cell index {idx} outside grid")
        return divmod(int(idx), self.n_cols)

    def cell_center(self, idx: int) -> Tuple[float, float]:
        return float(self.center_x[idx]), float(self.center_y[idx])

    def cell_at(self, x: float, y: float) -> Optional[int]:
        """Index of the cell containing (x, y), or None off the grid."""
        col = int(np.floor((x - self.origin[0]) / self.cell_size))
        row = int(np.floor((y - self.origin[1]) / self.cell_size))
        if 0 <= row < self.n_rows and 0 <= col < self.n_cols:
            return row * self.n_cols + col
        return None

    def get(self, idx: int) -> float:
        return float(self.prob[idx])

    def apply(self, cells: Sequence[int], values: np.ndarray) -> None:
        """Write posteriors for ``cells`` under the map lock."""
        with self._lock:
            self.prob[np.asarray(cells, dtype=np.int64)] = values

    def snapshot(self) -> "BeliefMap":
        """Independent copy taken under the map lock."""
        with self._lock:
            return BeliefMap(
                self.cell_size,
                self.n_rows,
                self.n_cols,
                self.origin,
                prob=self.prob.copy(),
                priority=self.priority.copy(),
            )

    copy = snapshot

    def entropy(self) -> np.ndarray:
        return entropy_array(self.prob)

    def total_entropy(self) -> float:
        return float(np.sum(self.entropy()))

    def to_document(self) -> BeliefMapDocument:
        priority = None
        if not np.all(self.priority == 1.0):
            priority = self.priority.tolist()
        return BeliefMapDocument(
            origin=self.origin,
            cell_size=self.cell_size,
            n_rows=self.n_rows,
            n_cols=self.n_cols,
            prob=self.prob.tolist(),
            priority=priority,
        )

    @classmethod
    def from_document(cls, doc: BeliefMapDocument) -> "BeliefMap":
        return cls(
            doc.cell_size,
            doc.n_rows,
            doc.n_cols,
            doc.origin,
            prob=np.asarray(doc.prob, dtype=float),
            priority=None if doc.priority is None else np.asarray(doc.priority),
        )

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_document().model_dump_json(indent=1))
        logger.debug("Wrote %dx%d belief map to %s", self.n_rows, self.n_cols, path)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "BeliefMap":
        doc = BeliefMapDocument.model_validate_json(Path(path).read_text())
        return cls.from_document(doc)

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        del state["_lock"]
        return state

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return (
            f"BeliefMap({self.n_rows}x{self.n_cols}, cell={self.cell_size} m, "
            f"origin={self.origin})"
        )


def total_entropy(belief: BeliefMap) -> float:
    """Unweighted sum of cell entropies in bits."""
    return belief.total_entropy()
