"""File-backed store for models, runs and analyses.

Layout under the store root:

    models/<model_id>/<version>.fcm.json   canonical model documents
    runs/<run_id>.json                     immutable run records
    analyses/<analysis_id>.json            immutable analysis records
    index.log                              append-only JSONL index

Every record file is written temp-then-rename before its index line is
appended, so a crash between any two writes loses at most the in-flight
request and never corrupts existing records. Startup replays the index;
a truncated final line or a missing file is skipped.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

from .core import FcmError, FcmModel
from .model_io import MODEL_SUFFIX, dump_canonical, load_model, save_model


class NotFoundError(FcmError):
    """No stored record under the requested id/version."""


class ConflictError(FcmError):
    """Optimistic-concurrency failure: the expected version is stale."""


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def _fsync_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(data)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)


class ScenarioStore:
    """Durable store; all mutations are serialized behind one lock, reads
    go to immutable in-memory records."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()
        self._models: dict[str, dict[int, FcmModel]] = {}
        self._model_meta: dict[str, dict[str, str]] = {}  # id -> created/updated
        self._runs: dict[str, dict] = {}
        self._analyses: dict[str, dict] = {}
        for sub in ("models", "runs", "analyses"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self._replay_index()

    @property
    def _index_path(self) -> Path:
        return self.root / "index.log"

    def _model_path(self, model_id: str, version: int) -> Path:
        return self.root / "models" / model_id / f"{version}{MODEL_SUFFIX}"

    def _replay_index(self) -> None:
        if not self._index_path.exists():
            return
        for line in self._index_path.read_text(encoding="utf-8").splitlines():
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn final append
            try:
                self._load_entry(entry)
            except (OSError, FcmError, KeyError, ValueError):
                continue  # index line without a usable file: in-flight loss
        for model_id, versions in self._models.items():
            meta = self._model_meta.setdefault(model_id, {})
            meta.setdefault("created_at", "")
            meta.setdefault("updated_at", "")

    def _load_entry(self, entry: dict) -> None:
        kind = entry["kind"]
        if kind == "model":
            model_id, version = entry["id"], int(entry["version"])
            model = load_model(self._model_path(model_id, version).read_bytes())
            self._models.setdefault(model_id, {})[version] = model
            meta = self._model_meta.setdefault(model_id, {})
            if version == 1:
                meta["created_at"] = entry.get("ts", "")
            meta["updated_at"] = entry.get("ts", "")
        elif kind == "run":
            run_id = entry["id"]
            path = self.root / "runs" / f"{run_id}.json"
            self._runs[run_id] = json.loads(path.read_text(encoding="utf-8"))
        elif kind == "analysis":
            analysis_id = entry["id"]
            path = self.root / "analyses" / f"{analysis_id}.json"
            self._analyses[analysis_id] = json.loads(path.read_text(encoding="utf-8"))

    def _append_index(self, entry: dict) -> None:
        with open(self._index_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(entry) + "\n")
            f.flush()
            os.fsync(f.fileno())

    # -- models ------------------------------------------------------------

    def create_model(self, model: FcmModel) -> tuple[str, int]:
        with self._lock:
            model_id = uuid.uuid4().hex[:12]
            while model_id in self._models:
                model_id = uuid.uuid4().hex[:12]
            self._put_model(model_id, 1, model)
            return model_id, 1

    def update_model(self, model_id: str, expected_version: int, model: FcmModel) -> int:
        with self._lock:
            versions = self._models.get(model_id)
            if not versions:
                raise NotFoundError(f"no model {model_id!r}")
            current = max(versions)
            if expected_version != current:
                raise ConflictError(
                    f"model {model_id!r} is at version {current}, expected {expected_version}"
                )
            version = current + 1
            self._put_model(model_id, version, model)
            return version

    def _put_model(self, model_id: str, version: int, model: FcmModel) -> None:
        ts = now_utc()
        path = self._model_path(model_id, version)
        path.parent.mkdir(parents=True, exist_ok=True)
        _fsync_write(path, save_model(model))
        self._append_index({"kind": "model", "id": model_id, "version": version, "ts": ts})
        self._models.setdefault(model_id, {})[version] = model
        meta = self._model_meta.setdefault(model_id, {})
        if version == 1:
            meta["created_at"] = ts
        meta["updated_at"] = ts

    def get_model(self, model_id: str, version: int | None = None) -> tuple[FcmModel, int]:
        versions = self._models.get(model_id)
        if not versions:
            raise NotFoundError(f"no model {model_id!r}")
        if version is None:
            version = max(versions)
        if version not in versions:
            raise NotFoundError(f"no version {version} of model {model_id!r}")
        return versions[version], version

    def model_meta(self, model_id: str) -> dict[str, str]:
        if model_id not in self._model_meta:
            raise NotFoundError(f"no model {model_id!r}")
        return dict(self._model_meta[model_id])

    # -- runs and analyses ---------------------------------------------------

    def add_run(self, record: dict) -> str:
        with self._lock:
            run_id = uuid.uuid4().hex[:16]
            record = {"run_id": run_id, **record}
            _fsync_write(self.root / "runs" / f"{run_id}.json", dump_canonical(record))
            self._append_index({"kind": "run", "id": run_id, "ts": record.get("created_at", "")})
            self._runs[run_id] = record
            return run_id

    def get_run(self, run_id: str) -> dict:
        try:
            return self._runs[run_id]
        except KeyError:
            raise NotFoundError(f"no run {run_id!r}") from None

    def add_analysis(self, record: dict) -> str:
        with self._lock:
            analysis_id = uuid.uuid4().hex[:16]
            record = {"analysis_id": analysis_id, **record}
            _fsync_write(self.root / "analyses" / f"{analysis_id}.json", dump_canonical(record))
            self._append_index(
                {"kind": "analysis", "id": analysis_id, "ts": record.get("created_at", "")}
            )
            self._analyses[analysis_id] = record
            return analysis_id

    def get_analysis(self, analysis_id: str) -> dict:
        try:
            return self._analyses[analysis_id]
        except KeyError:
            raise NotFoundError(f"no analysis {analysis_id!r}") from None
