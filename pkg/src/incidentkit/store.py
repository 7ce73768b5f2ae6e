"""Local file-based pattern repository.

A store directory holds an index file plus one JSON file per pattern.
Writes go through a lock file and land via atomic renames, so a crash
mid-add never leaves a dangling index entry. Patterns are deduplicated by
a content hash over their canonical JSON serialization.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from filelock import FileLock

from .errors import DuplicateHashError, FormatError, ValidationFailedError
from .incident import PATTERN, CrimeScript, validate_script

INDEX_VERSION = 1


@dataclass(frozen=True)
class RepoEntry:
    id: str
    name: str
    hash: str
    created: str
    path: str


class PatternStore:
    def __init__(self, root):
        self.root = Path(root)
        self.patterns_dir = self.root / "patterns"
        self.index_path = self.root / "index.json"
        self.lock = FileLock(str(self.root / ".lock"))

    def _ensure(self):
        self.patterns_dir.mkdir(parents=True, exist_ok=True)

    def _read_index(self):
        if not self.index_path.exists():
            return []
        try:
            with open(self.index_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            if doc.get("version") != INDEX_VERSION:
                raise FormatError(f"unsupported store index version {doc.get('version')}")
            return [RepoEntry(**e) for e in doc["entries"]]
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FormatError(f"cannot read store index: {exc}") from None

    def _write_index(self, entries):
        doc = {"version": INDEX_VERSION,
               "entries": [e.__dict__ for e in entries]}
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".index-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2)
            os.replace(tmp, self.index_path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def add(self, pattern_doc, taxonomy):
        """Validate, deduplicate, and store a PATTERN script; returns its id."""
        script = CrimeScript.from_dict(pattern_doc)
        violations = validate_script(script, taxonomy)
        if script.category != PATTERN:
            violations = list(violations) + [
                f"{script.name}: category: only PATTERN scripts are stored"]
        if violations:
            raise ValidationFailedError(violations)
        canonical = json.dumps(script.to_dict(), sort_keys=True,
                               separators=(",", ":")).encode()
        digest = hashlib.sha256(canonical).hexdigest()
        self._ensure()
        with self.lock:
            entries = self._read_index()
            if any(e.hash == digest for e in entries):
                raise DuplicateHashError(f"pattern already stored (hash {digest[:12]})")
            pattern_id = digest[:12]
            filename = f"{pattern_id}.json"
            fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".pattern-")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    json.dump(script.to_dict(), fh, indent=2)
                os.replace(tmp, self.patterns_dir / filename)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
            entry = RepoEntry(
                id=pattern_id,
                name=script.name,
                hash=digest,
                created=datetime.now(timezone.utc).isoformat(),
                path=str(Path("patterns") / filename),
            )
            self._write_index(entries + [entry])
        return pattern_id

    def list(self, name_filter=None):
        """Entries newest first, optionally filtered by a name substring."""
        entries = self._read_index()
        if name_filter:
            needle = name_filter.lower()
            entries = [e for e in entries if needle in e.name.lower()]
        return sorted(entries, key=lambda e: e.created, reverse=True)

    def get(self, pattern_id):
        for entry in self._read_index():
            if entry.id == pattern_id:
                path = self.root / entry.path
                try:
                    with open(path, "r", encoding="utf-8") as fh:
                        return json.load(fh)
                except (OSError, json.JSONDecodeError) as exc:
                    raise FormatError(f"cannot read pattern {pattern_id}: {exc}") from None
        return None
