"""Video-to-part-sequence ingestion for the hypertrack tracker."""

from .ingest import (
    DEFAULT_COUNT_RANGE,
    ForegroundColorModel,
    IngestError,
    IngestSummary,
    ingest_video,
    make_demo_video,
    target_segment_count,
)

__version__ = "0.1.0"
