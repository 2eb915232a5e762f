# schemas/graph.py
"""Graph and dataset models."""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

Edge = Tuple[int, int]


class Graph(BaseModel):
    """Undirected simple graph with optional discrete node labels."""

    model_config = ConfigDict(frozen=True)

    node_count: int
    edges: Tuple[Edge, ...] = ()
    node_labels: Optional[Tuple[int, ...]] = None

    @field_validator("node_count")
    @classmethod
    def node_count_must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Graph must have at least one node")
        return v

    @field_validator("edges")
    @classmethod
    def edges_must_be_simple(cls, v: Tuple[Edge, ...]) -> Tuple[Edge, ...]:
        canonical = []
        for i, j in v:
            if i == j:
                raise ValueError(f"Self-loop on node {i}")
            canonical.append((i, j) if i < j else (j, i))
        if len(set(canonical)) != len(canonical):
            raise ValueError("Duplicate undirected edge")
        return tuple(sorted(canonical))

    @field_validator("node_labels")
    @classmethod
    def labels_must_be_non_negative(cls, v: Optional[Tuple[int, ...]]) -> Optional[Tuple[int, ...]]:
        if v is not None and any(label < 0 for label in v):
            raise ValueError("Node labels must be non-negative")
        return v

    @model_validator(mode="after")
    def check_against_node_count(self) -> "Graph":
        for i, j in self.edges:
            if j >= self.node_count or i < 0:
                raise ValueError(f"Edge ({i}, {j}) outside [0, {self.node_count})")
        if self.node_labels is not None and len(self.node_labels) != self.node_count:
            raise ValueError(
                f"{len(self.node_labels)} node labels for {self.node_count} nodes"
            )
        return self

    @property
    def labeled(self) -> bool:
        return self.node_labels is not None

    def degrees(self) -> list[int]:
        degree = [0] * self.node_count
        for i, j in self.edges:
            degree[i] += 1
            degree[j] += 1
        return degree

    def neighbors(self) -> list[list[int]]:
        adjacency: list[list[int]] = [[] for _ in range(self.node_count)]
        for i, j in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        return adjacency


class Dataset(BaseModel):
    """A named collection of graphs with one class id per graph."""

    model_config = ConfigDict(frozen=True)

    name: str
    graphs: Tuple[Graph, ...]
    graph_labels: Tuple[int, ...]

    @model_validator(mode="after")
    def check_consistency(self) -> "Dataset":
        if not self.graphs:
            raise ValueError("Dataset must contain at least one graph")
        if len(self.graphs) != len(self.graph_labels):
            raise ValueError(
                f"{len(self.graphs)} graphs but {len(self.graph_labels)} graph labels"
            )
        labeled = {g.labeled for g in self.graphs}
        if len(labeled) > 1:
            raise ValueError("Either all graphs carry node labels or none do")
        return self

    @property
    def size(self) -> int:
        return len(self.graphs)

    @property
    def labeled(self) -> bool:
        return self.graphs[0].labeled

    @property
    def classes(self) -> list[int]:
        return sorted(set(self.graph_labels))

    @property
    def max_node_count(self) -> int:
        return max(g.node_count for g in self.graphs)
