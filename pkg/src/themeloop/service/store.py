"""Flat-file persistence: append-only JSONL logs plus atomic JSON snapshots.

Crash model: appends flush and fsync per record, so at most the final
record of a JSONL file can be torn by a crash; readers drop a torn tail
and surface it, while corruption anywhere earlier is an error.  Snapshots
are written to a temp file and atomically renamed into place.
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterable, Mapping


class StoreError(RuntimeError):
    """The on-disk store is missing, malformed, or corrupted."""


def _dump_compact(payload: Mapping[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _heal_torn_tail(path: Path) -> None:
    """Drop an unterminated trailing fragment left by a crashed append.

    A fragment without its newline never finished its fsync, so it was
    never committed; truncating it protects the next append from gluing
    onto it and corrupting a committed record.
    """
    if not path.exists() or path.stat().st_size == 0:
        return
    with open(path, "rb+") as f:
        f.seek(-1, os.SEEK_END)
        if f.read(1) == b"\n":
            return
        data = Path(path).read_bytes()
        keep = data.rfind(b"\n") + 1  # 0 when no newline at all
        f.truncate(keep)
        f.flush()
        os.fsync(f.fileno())


def append_jsonl(path: Path, record: Mapping[str, Any]) -> None:
    """Append one record durably: heal any torn tail, write, flush, fsync."""
    path.parent.mkdir(parents=True, exist_ok=True)
    _heal_torn_tail(path)
    line = _dump_compact(record) + "\n"
    with open(path, "a", encoding="utf-8") as f:
        f.write(line)
        f.flush()
        os.fsync(f.fileno())


def read_jsonl(path: Path, *, tolerate_torn_tail: bool = True) -> list[dict[str, Any]]:
    """Read every committed record.

    A record is committed once its trailing newline is fsynced, so an
    unterminated final line is an append the crash interrupted: it is
    dropped (the next append truncates it), exactly as if the write never
    happened.  Pass ``tolerate_torn_tail=False`` to raise on one instead.
    A line that fails to parse anywhere *before* the end means the file
    was corrupted by something other than a crashed append and always
    raises :class:`StoreError`.
    """
    path = Path(path)
    if not path.exists():
        return []
    raw = path.read_bytes().decode("utf-8", errors="replace")
    if not raw:
        return []
    lines = raw.split("\n")
    complete, tail = lines[:-1], lines[-1]
    records: list[dict[str, Any]] = []
    for i, line in enumerate(complete):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise StoreError(f"{path}: corrupt record on line {i + 1}") from exc
    if tail.strip() and not tolerate_torn_tail:
        raise StoreError(f"{path}: torn trailing record")
    return records


def write_json_atomic(path: Path, payload: Any) -> None:
    """Write a JSON snapshot via temp file + rename so readers never see a torn file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


def read_json(path: Path) -> Any:
    path = Path(path)
    if not path.exists():
        raise StoreError(f"missing snapshot: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise StoreError(f"{path}: invalid JSON snapshot") from exc


class DataStore:
    """Directory layout for one pipeline run.

    ::

        root/
          config.json
          convergence.json
          model.ckpt
          service.jsonl
          iterations/R{n}/
            themes.json
            events.jsonl
            sessions.jsonl
            trials.jsonl
            clustering.json
            report.json
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    # -- paths ---------------------------------------------------------
    def iteration_dir(self, n: int) -> Path:
        return self.root / "iterations" / f"R{n}"

    def sessions_path(self, n: int) -> Path:
        return self.iteration_dir(n) / "sessions.jsonl"

    def events_path(self, n: int) -> Path:
        return self.iteration_dir(n) / "events.jsonl"

    def trials_path(self, n: int) -> Path:
        return self.iteration_dir(n) / "trials.jsonl"

    def themes_path(self, n: int) -> Path:
        return self.iteration_dir(n) / "themes.json"

    def clustering_path(self, n: int) -> Path:
        return self.iteration_dir(n) / "clustering.json"

    def report_path(self, n: int) -> Path:
        return self.iteration_dir(n) / "report.json"

    @property
    def config_path(self) -> Path:
        return self.root / "config.json"

    @property
    def convergence_path(self) -> Path:
        return self.root / "convergence.json"

    @property
    def model_path(self) -> Path:
        return self.root / "model.ckpt"

    @property
    def service_log_path(self) -> Path:
        return self.root / "service.jsonl"

    # -- iteration listing ----------------------------------------------
    def list_iterations(self) -> list[int]:
        base = self.root / "iterations"
        if not base.exists():
            return []
        out = []
        for child in base.iterdir():
            if child.is_dir() and child.name.startswith("R"):
                try:
                    out.append(int(child.name[1:]))
                except ValueError:
                    continue
        return sorted(out)

    # -- sessions --------------------------------------------------------
    def append_session(self, n: int, record: Mapping[str, Any]) -> None:
        append_jsonl(self.sessions_path(n), record)

    def read_sessions(self, n: int) -> list[dict[str, Any]]:
        return read_jsonl(self.sessions_path(n))

    def append_event(self, n: int, record: Mapping[str, Any]) -> None:
        append_jsonl(self.events_path(n), record)

    def read_events(self, n: int) -> list[dict[str, Any]]:
        return read_jsonl(self.events_path(n))

    def append_trial(self, n: int, record: Mapping[str, Any]) -> None:
        append_jsonl(self.trials_path(n), record)

    def read_trials(self, n: int) -> list[dict[str, Any]]:
        return read_jsonl(self.trials_path(n))

    # -- snapshots ---------------------------------------------------------
    def write_themes(self, n: int, themes: Iterable[Mapping[str, Any]]) -> None:
        write_json_atomic(self.themes_path(n), list(themes))

    def read_themes(self, n: int) -> list[dict[str, Any]]:
        return read_json(self.themes_path(n))

    def write_clustering(self, n: int, payload: Mapping[str, Any]) -> None:
        write_json_atomic(self.clustering_path(n), dict(payload))

    def read_clustering(self, n: int) -> dict[str, Any]:
        return read_json(self.clustering_path(n))

    def write_report(self, n: int, payload: Mapping[str, Any]) -> None:
        write_json_atomic(self.report_path(n), dict(payload))

    def read_report(self, n: int) -> dict[str, Any]:
        return read_json(self.report_path(n))

    def write_config(self, payload: Mapping[str, Any]) -> None:
        write_json_atomic(self.config_path, dict(payload))

    def read_config(self) -> dict[str, Any]:
        return read_json(self.config_path)

    def write_convergence(self, payload: Mapping[str, Any]) -> None:
        write_json_atomic(self.convergence_path, dict(payload))

    def read_convergence(self) -> dict[str, Any]:
        return read_json(self.convergence_path)
