"""Part-based visual tracking via geometric hypergraph correspondence modes."""

from .config import TrackerConfig
from .correspondence import (
    Vertex,
    VertexSet,
    association_confidence,
    build_vertex_set,
    chi2_distance,
    distance_gate,
    distance_threshold,
    reduce_vertices,
)
from .evaluate import Metrics, compute_metrics, center_error, iou
from .hypergraph import (
    Hyperedge,
    Hypergraph,
    mode_confidence,
    pairwise_geometric_confidence,
    sample_hyperedges,
    triangle_geometric_confidence,
    triangle_is_degenerate,
)
from .mode_parsing import ReliablePart, parse_modes
from .mode_seeking import (
    Mode,
    ModeState,
    ascend,
    brute_force_oracle,
    gradient,
    objective,
    pairwise_update,
    seek_all_modes,
    seek_mode,
    select_pair,
)
from .model_update import update_target_set
from .parts import (
    Frame,
    Part,
    SearchArea,
    SequenceMeta,
    SequenceParseError,
    SequenceValidationError,
    TargetPart,
    read_sequence,
    search_area_of,
    write_sequence,
)
from .state_estimation import (
    ConfidenceMap,
    TargetState,
    box_score,
    build_confidence_map,
    refine_state,
    rough_center,
)
from .synth import GenSpec, generate_sequence, make_prototypes
from .tracker import FrameRecord, Tracker, records_to_csv, track_sequence

__version__ = "0.1.0"
