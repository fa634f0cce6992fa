"""Tabular dump of a planning tree."""

from typing import List, Optional

from pydantic import BaseModel, Field


class NodeRecord(BaseModel):
    id: int
    parent: Optional[int] = None
    x: float
    y: float
    z: float
    psi: float
    cost: float
    info: float
    closed: bool
    delta_size: int = Field(..., description="Entries in the node's belief delta")


class EdgeRecord(BaseModel):
    parent: int
    child: int
    length: float
    word: str
    segments: List[List[float]] = Field(
        default_factory=list, description="(curvature, length) pairs"
    )


class TreeDump(BaseModel):
    """Node table plus edge table, enough to inspect or diff a tree."""

    root: int
    budget: float
    nodes: List[NodeRecord]
    edges: List[EdgeRecord]
