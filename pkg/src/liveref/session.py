"""The liveness loop: edit/focus triggers, serialized inspections and applies,
snapshot persistence and replayable metric-evolution statistics.

One coordinator owns all session state. Inspections and applies on the same
file hold that file's lock, so they never interleave; publications take the
session lock, so subscribers observe a monotone sequence per file.
"""

from __future__ import annotations

import difflib
import json
import logging
import os
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .candidates import AnalysisResult, Config, analyze_source, text_fingerprint
from .extraction import (
    RefactoringError,
    StaleCandidateError,
    apply_extract_method,
    resolve_fragment,
)
from .metrics import MetricsReport

log = logging.getLogger("liveref")

LOG_FILE_NAME = "refactoring-log.jsonl"
CONFIG_FILE_NAME = "liveref.json"

IMPROVEMENT_METRICS = ("loc", "cc", "cog", "length", "volume", "effort", "difficulty", "mi")


@dataclass
class SnapshotRecord:
    timestamp: int  # UTC milliseconds
    file: str
    candidate_id: str
    method_name: str
    before: MetricsReport
    after_host: MetricsReport
    after_new: MetricsReport
    elapsed_ms: int

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "file": self.file,
            "candidate_id": self.candidate_id,
            "method_name": self.method_name,
            "before": self.before.to_dict(),
            "after_host": self.after_host.to_dict(),
            "after_new": self.after_new.to_dict(),
            "elapsed_ms": self.elapsed_ms,
        }


@dataclass
class SessionState:
    current: dict[str, tuple[str, AnalysisResult]] = field(default_factory=dict)
    cfg: Config = field(default_factory=Config)
    pending_delta: dict[str, int] = field(default_factory=dict)


def load_config(workspace: Path) -> Config:
    path = Path(workspace) / CONFIG_FILE_NAME
    if not path.exists():
        return Config()
    data = json.loads(path.read_text(encoding="utf-8"))
    return Config.from_dict(data)


def _atomic_write(path: Path, text: str):
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".liveref-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, str(path))
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class LiveSession:
    """Coordinator for one workspace's live analysis and refactoring."""

    def __init__(
        self,
        workspace: str | Path,
        cfg: Config | None = None,
        debounce: float = 0.0,
        clock=time.time,
    ):
        self.workspace = Path(workspace)
        self.state = SessionState(cfg=cfg if cfg is not None else load_config(self.workspace))
        self.debounce = debounce
        self.clock = clock
        self.log_path = self.workspace / LOG_FILE_NAME
        self._lock = threading.RLock()
        self._file_locks: dict[str, threading.RLock] = {}
        self._units: dict[str, object] = {}
        self._documents: dict[str, bytes] = {}
        self._timers: dict[str, threading.Timer] = {}
        self._subscribers: list = []
        self._seq = 0

    # --- paths ----------------------------------------------------------

    def _key(self, file: str | Path) -> str:
        p = Path(file)
        if not p.is_absolute():
            p = self.workspace / p
        p = p.resolve()
        try:
            return p.relative_to(self.workspace.resolve()).as_posix()
        except ValueError:
            return p.as_posix()

    def _disk_path(self, key: str) -> Path:
        p = Path(key)
        return p if p.is_absolute() else self.workspace / p

    def _file_lock(self, key: str) -> threading.RLock:
        with self._lock:
            lock = self._file_locks.get(key)
            if lock is None:
                lock = self._file_locks[key] = threading.RLock()
            return lock

    # --- subscriptions ----------------------------------------------------

    def subscribe(self):
        import queue

        q: "queue.Queue" = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q):
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _publish(self, event: dict):
        with self._lock:
            self._seq += 1
            event = dict(event, seq=self._seq)
            for q in list(self._subscribers):
                q.put(event)

    # --- triggers ---------------------------------------------------------

    def on_edit(self, file: str, changed_chars: int) -> str:
        """Accumulate edit sizes; at the trigger threshold, re-inspect."""
        key = self._key(file)
        with self._lock:
            total = self.state.pending_delta.get(key, 0) + max(0, int(changed_chars))
            if total >= self.state.cfg.edit_trigger_chars:
                self.state.pending_delta[key] = 0
                triggered = True
            else:
                self.state.pending_delta[key] = total
                triggered = False
        if triggered:
            self._schedule_inspection(key)
            return "triggered"
        return "accumulated"

    def on_focus(self, file: str) -> AnalysisResult:
        """File-switch trigger: unconditional inspection."""
        return self.run_inspection(file)

    def _schedule_inspection(self, key: str):
        if self.debounce <= 0:
            self.run_inspection(key)
            return
        with self._lock:
            timer = self._timers.get(key)
            if timer is not None:
                timer.cancel()
            timer = threading.Timer(self.debounce, self._run_scheduled, args=(key,))
            timer.daemon = True
            self._timers[key] = timer
            timer.start()

    def _run_scheduled(self, key: str):
        try:
            self.run_inspection(key)
        except OSError as exc:
            log.warning("inspection of %s failed: %s", key, exc)

    # --- pipeline ---------------------------------------------------------

    def run_inspection(self, file: str) -> AnalysisResult:
        """Parse, measure, enumerate, rank, grade and publish, atomically."""
        key = self._key(file)
        with self._file_lock(key):
            text = self._disk_path(key).read_text(encoding="utf-8")
            unit, result = analyze_source(text, key, self.state.cfg)
            result.timestamp = self.clock()
            with self._lock:
                self.state.current[key] = (text, result)
                self._units[key] = unit
                self._documents.pop(key, None)
            self._publish({"type": "analysis", "document": self.document_dict(key)})
            return result

    def analysis_for(self, file: str) -> AnalysisResult | None:
        key = self._key(file)
        with self._lock:
            entry = self.state.current.get(key)
            return entry[1] if entry else None

    def document_dict(self, file: str) -> dict | None:
        from .document import build_document

        key = self._key(file)
        with self._lock:
            entry = self.state.current.get(key)
            if entry is None:
                return None
            text, result = entry
        return build_document(key, text, result, self.state.cfg)

    def apply_refactoring(self, file: str, candidate_id: str, name: str | None = None) -> SnapshotRecord:
        """Apply a candidate, persist atomically, log the snapshot, re-inspect."""
        key = self._key(file)
        with self._file_lock(key):
            with self._lock:
                entry = self.state.current.get(key)
                unit = self._units.get(key)
            if entry is None or unit is None:
                raise StaleCandidateError(f"no analysis for {key}; run an inspection first")
            text, result = entry

            candidate = next((c for c in result.candidates if c.id == candidate_id), None)
            if candidate is None:
                raise StaleCandidateError(f"candidate {candidate_id} is not in the current analysis")

            disk_text = self._disk_path(key).read_text(encoding="utf-8")
            if text_fingerprint(disk_text) != result.text_sha:
                raise StaleCandidateError("file changed on disk since the last inspection")

            fragment = resolve_fragment(unit, candidate.parent_block, candidate.range)
            if fragment is None:
                raise StaleCandidateError("candidate fragment no longer resolves")

            rewrite = apply_extract_method(
                unit, fragment, name=name, expected_id=candidate.id, current_id=candidate.id
            )

            _atomic_write(self._disk_path(key), rewrite.new_text)

            now_ms = int(self.clock() * 1000)
            elapsed = max(0, now_ms - int(result.timestamp * 1000))
            record = SnapshotRecord(
                timestamp=now_ms,
                file=key,
                candidate_id=candidate.id,
                method_name=candidate.method_name,
                before=rewrite.before,
                after_host=rewrite.after[0],
                after_new=rewrite.after[1],
                elapsed_ms=elapsed,
            )
            self._append_snapshot(record)
            self._publish({"type": "applied", "record": record.to_dict()})
            self.run_inspection(key)
            return record

    def _append_snapshot(self, record: SnapshotRecord):
        with self._lock:
            with open(self.log_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


# --- snapshot statistics ---------------------------------------------------


def record_improvements(record: dict) -> dict[str, float]:
    """Signed relative improvement (%) of each tracked metric for one record.

    Decreasing loc/cc/cog/Halstead is an improvement; increasing mi is."""
    before = record["before"]
    after = record["after_host"]

    def flat(report: dict, name: str) -> float:
        if name in ("length", "volume", "effort", "difficulty"):
            return float(report["halstead"][name])
        return float(report[name])

    out = {}
    for name in IMPROVEMENT_METRICS:
        b = flat(before, name)
        a = flat(after, name)
        if b == 0:
            out[name] = 0.0
        elif name == "mi":
            out[name] = (a - b) / b * 100.0
        else:
            out[name] = (b - a) / b * 100.0
    return out


def replay_stats(log_path: str | Path) -> dict:
    """Refactoring count and per-metric average improvement from the log."""
    path = Path(log_path)
    records = []
    if path.exists():
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line:
                records.append(json.loads(line))
    count = len(records)
    sums = {name: 0.0 for name in IMPROVEMENT_METRICS}
    for rec in records:
        for name, value in record_improvements(rec).items():
            sums[name] += value
    averages = {name: (sums[name] / count if count else 0.0) for name in IMPROVEMENT_METRICS}
    return {"count": count, "avg_improvement_pct": averages}


def greedy_extract(session: LiveSession, file: str, max_steps: int = 100) -> list[SnapshotRecord]:
    """Apply the rank-1 candidate repeatedly until none remain."""
    records = []
    for _ in range(max_steps):
        result = session.on_focus(file)
        if not result.candidates:
            break
        top = result.candidates[0]
        records.append(session.apply_refactoring(file, top.id))
    else:
        raise RefactoringError(f"greedy extraction did not converge within {max_steps} steps")
    return records


# --- filesystem watching -----------------------------------------------------


def changed_char_count(old: str, new: str) -> int:
    """Size of the edit between two texts (replaced/inserted/deleted chars)."""
    matcher = difflib.SequenceMatcher(a=old, b=new, autojunk=False)
    total = 0
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag != "equal":
            total += max(i2 - i1, j2 - j1)
    return total


class WorkspaceWatcher:
    """Polling watcher feeding edit/focus triggers into a session."""

    def __init__(self, session: LiveSession, interval: float = 0.5):
        self.session = session
        self.interval = interval
        self._texts: dict[str, str] = {}
        self._stop = threading.Event()

    def scan_once(self) -> list[str]:
        touched = []
        for path in sorted(self.session.workspace.rglob("*.java")):
            key = self.session._key(path)
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                log.warning("watch: cannot read %s: %s", path, exc)
                continue
            previous = self._texts.get(key)
            if previous is None:
                self._texts[key] = text
                try:
                    self.session.on_focus(key)
                except OSError as exc:
                    log.warning("watch: %s", exc)
                touched.append(key)
            elif previous != text:
                self._texts[key] = text
                self.session.on_edit(key, changed_char_count(previous, text))
                touched.append(key)
        return touched

    def run(self):
        while not self._stop.is_set():
            self.scan_once()
            self._stop.wait(self.interval)

    def stop(self):
        self._stop.set()
