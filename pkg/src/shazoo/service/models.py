"""Pydantic request/response models for the REST service.

Graphs and labels travel as text payloads in the exact same formats the
CLI reads from files (edge-list TSV and "node<TAB>label" lines), so a file
can be posted verbatim.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

TreeKind = Literal["rst", "nwrst", "mst"]


class GraphIn(BaseModel):
    edge_list: str = Field(description="edge-list text: 'u<TAB>v<TAB>w' lines, '#' comments")
    signed: bool = False


class BuildGraphRequest(BaseModel):
    edge_list: Optional[str] = None
    features_csv: Optional[str] = None
    knn_k: int = 10
    signed: bool = False


class GraphSummary(BaseModel):
    node_count: int
    edge_count: int
    signed: bool
    edge_list: str
    id_map: dict[str, int]


class SampleTreeRequest(BaseModel):
    graph: GraphIn
    kind: TreeKind = "rst"
    seed: Optional[int] = None


class SampleTreeResponse(BaseModel):
    kind: TreeKind
    seed: Optional[int]
    walk_steps: int
    edge_list: str


class PredictRequest(BaseModel):
    graph: GraphIn
    labels: str = Field(description="training labels, 'node<TAB>+1/-1' lines")
    test_nodes: Optional[list[str]] = Field(
        default=None, description="external ids; every unlabeled node when omitted"
    )
    mode: Literal["batch", "signed"] = "batch"
    tree_kind: Optional[TreeKind] = Field(
        default=None, description="reduce a general graph through this spanning tree"
    )
    tree_seed: Optional[int] = None


class PredictResponse(BaseModel):
    predictions: dict[str, int]
    default_fraction: float
    tree_kind: Optional[TreeKind] = None
    components: int = 1


class AdversaryRequest(BaseModel):
    graph: GraphIn
    budget: float
    seed: int = 0
    runs: int = Field(default=0, ge=0, description="online runs to score; 0 emits one instance")


class AdversaryStats(BaseModel):
    runs: int
    mean_mistakes: float
    lower_bound: float
    budget_edges: int


class AdversaryResponse(BaseModel):
    budget: float
    removed_edges: list[int]
    labels: Optional[str] = None
    stats: Optional[AdversaryStats] = None


class AuditRequest(BaseModel):
    graph: GraphIn
    labels: str = Field(description="full labeling, 'node<TAB>+1/-1' lines")
    order_seed: int = 0
    repetitions: int = Field(default=1, ge=1)


class AuditRow(BaseModel):
    repetition: int
    mistakes: int
    cut_edges: int
    weighted_cutsize: float
    budget_edges: int
    lower_proxy: float
    upper_proxy: float
    saturated: bool


class AuditResponse(BaseModel):
    rows: list[AuditRow]
    csv: str
    note: str


class ExperimentRequest(BaseModel):
    graph: Optional[GraphIn] = None
    features_csv: Optional[str] = None
    knn_k: int = 10
    labels: str
    algorithm: str = "shazoo"
    tree_kind: TreeKind = "mst"
    train_fraction: float = 0.1
    repetitions: int = 10
    seed: int = 0
    committee_size: int = 11
    metric: Literal["error_rate", "f_measure"] = "error_rate"


class ExperimentResponse(BaseModel):
    csv: str
    mean: float
    std: float


class ErrorBody(BaseModel):
    error: str
    kind: Literal["data", "config"]
