"""Shazoo: online and batch node-label prediction on weighted trees.

The core predictor answers +/-1 label queries on a weighted tree from the
labels revealed so far, choosing the sign of the cut margin of the nearest
hinge node.  Around it the package ships the graph-to-tree reductions
(random and minimum spanning trees), the signed-graph variant, the usual
baselines (online majority vote, label propagation, nearest neighbor on a
linearized tree, committees), an adversarial lower-bound generator, and an
experiment harness exposed through a CLI and a small REST service.
"""

from .baselines import (
    CommitteeConfig,
    committee_predict,
    label_propagation,
    labprop_predict,
    omv_run,
    wta_predict,
)
from .bounds import (
    AdversarialInstance,
    BoundGapReport,
    CutsizeReport,
    adversarial_instance,
    bound_gap_report,
    cutsize_report,
    max_edges_within_budget,
    resistance_diameter,
)
from .cuts import (
    CutTable,
    batch_cut_values,
    cut_margin,
    cut_value,
    frustration_value,
)
from .errors import (
    ConfigError,
    CycleDetected,
    DataError,
    DegenerateSigma,
    Disconnected,
    EdgeListError,
    NoTrainingLabels,
    PositiveWeightsRequired,
    RevealedQuery,
    ShazooError,
    SignedModeRequired,
)
from .graphs import (
    RevealedState,
    WeightedGraph,
    WeightedTree,
    as_tree,
    dump_edge_list,
    dump_labels,
    load_binary_labels,
    load_edge_list,
    load_label_file,
    random_tree,
    resistance_distance,
    tree_path,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    error_rate,
    f_measure,
    knn_graph,
    load_feature_csv,
    make_split,
    one_vs_all,
    run_experiment,
    synth_planted_tree,
)
from .predict import (
    HingeView,
    MistakeTrace,
    PredictionStep,
    hinge_structure,
    predict_batch,
    predict_batch_with_stats,
    predict_online,
    predict_signed,
    run_online,
)
from .spanning import (
    TreeSample,
    WeightedLine,
    dfs_linearize,
    minimum_spanning_tree,
    sample_tree,
    wilson_spanning_tree,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
