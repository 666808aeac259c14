"""Local-first capture, archiving, and export of ephemeral social-media stories."""

__version__ = "0.1.0"

from .archive import Archive, MediaAsset, Observation, Session, init_archive
from .envelope import Envelope, envelope_from_dict, envelope_from_json_line
from .export import CSV_COLUMNS, ExportConfig, export_csv, pseudonymize_username
from .ingest import (
    IngestReceipt,
    IngestSummary,
    ingest_envelope,
    ingest_har,
    ingest_ndjson,
)
from .items import MediaRef, Sticker, StoryItem, TrayEntry
from .media import FetchReport, enqueue_media, fetch_pending, verify_media
from .parse import (
    parse_highlight_payload,
    parse_reel_payload,
    parse_tray_payload,
    select_best_media,
)
from .patterns import EndpointKind, PatternTable, classify_endpoint
from .tides import (
    CoverageReport,
    SchedulePlan,
    coverage_report,
    expected_observations,
    observing_sessions,
    plan_sessions,
)

__all__ = [
    "Archive",
    "CSV_COLUMNS",
    "CoverageReport",
    "EndpointKind",
    "Envelope",
    "ExportConfig",
    "FetchReport",
    "IngestReceipt",
    "IngestSummary",
    "MediaAsset",
    "MediaRef",
    "Observation",
    "PatternTable",
    "SchedulePlan",
    "Session",
    "Sticker",
    "StoryItem",
    "TrayEntry",
    "classify_endpoint",
    "coverage_report",
    "enqueue_media",
    "envelope_from_dict",
    "envelope_from_json_line",
    "expected_observations",
    "export_csv",
    "fetch_pending",
    "ingest_envelope",
    "ingest_har",
    "ingest_ndjson",
    "init_archive",
    "observing_sessions",
    "parse_highlight_payload",
    "parse_reel_payload",
    "parse_tray_payload",
    "plan_sessions",
    "pseudonymize_username",
    "select_best_media",
    "verify_media",
]
