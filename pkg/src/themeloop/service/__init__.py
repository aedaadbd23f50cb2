"""Persistence and HTTP service for sessions, trials, and pipeline state."""
from .app import create_app
from .sessions import PHASE_ORDER, REVIEW_PHASES, ServiceError, SessionManager
from .store import (
    DataStore,
    StoreError,
    append_jsonl,
    read_json,
    read_jsonl,
    write_json_atomic,
)
from .trials import TrialManager, load_question_bank

__all__ = [
    "DataStore",
    "PHASE_ORDER",
    "REVIEW_PHASES",
    "ServiceError",
    "SessionManager",
    "StoreError",
    "TrialManager",
    "append_jsonl",
    "create_app",
    "load_question_bank",
    "read_json",
    "read_jsonl",
    "write_json_atomic",
]
