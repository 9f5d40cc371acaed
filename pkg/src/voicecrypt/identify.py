"""Closed-set speaker identification against an encrypted template store.

A database is a directory holding ``manifest.json`` and one ``.vcr``
ciphertext per enrolled template. Plaintext audio never touches the
directory: features for every method are computed at enrollment and cached
in the manifest, and only the ciphertext is written.

Distances are Euclidean on z-scored coordinates, with per-dimension
statistics taken over every cached vector of the method (zero-variance
dimensions are dropped). ``normalize=False`` gives raw Euclidean distance.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from filelock import FileLock

from .audio import Signal, load
from .cipher import CipherText, decrypt, encrypt
from .errors import (
    DuplicateTemplate,
    EmptyDatabase,
    EmptyDataset,
    IntegrityError,
    LabelMissing,
    LengthMismatch,
    MethodMismatch,
)
from .features import DIMENSIONS, METHODS, FeatureVector, extract
from .keys import KeyPair
from .pitch import FrameConfig

MANIFEST = "manifest.json"
MANIFEST_VERSION = 1
AUDIO_SUFFIXES = (".wav",)


@dataclass
class TemplateEntry:
    speaker_id: str
    template_id: str
    template: str  # path relative to the database directory
    digest: str
    enrolled_at: str
    features: dict[str, np.ndarray]

    def to_json(self) -> dict:
        return {
            "speaker_id": self.speaker_id,
            "template_id": self.template_id,
            "template": self.template,
            "digest": self.digest,
            "enrolled_at": self.enrolled_at,
            "features": {m: v.tolist() for m, v in self.features.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> "TemplateEntry":
        feats = {m: np.asarray(v, dtype=np.float64) for m, v in d["features"].items()}
        return cls(d["speaker_id"], d["template_id"], d["template"], d["digest"],
                   d["enrolled_at"], feats)


@dataclass(frozen=True)
class RankedResult:
    ranking: list[tuple[str, str, float]]

    @property
    def decision(self) -> str:
        return self.ranking[0][0]

    def speakers(self) -> list[tuple[str, float]]:
        """Speakers by ascending best (minimum) template distance."""
        seen: dict[str, float] = {}
        for spk, _, dist in self.ranking:
            seen.setdefault(spk, dist)
        return list(seen.items())


def signal_digest(signal: Signal) -> str:
    return hashlib.sha256(np.ascontiguousarray(signal.samples, dtype="<f8").tobytes()).hexdigest()


def feature_stats(vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return vectors.mean(axis=0), vectors.std(axis=0)


def euclidean(a: FeatureVector, b: FeatureVector, mean=None, std=None) -> float:
    """Distance between two vectors of one method.

    With ``mean`` and ``std`` the coordinates are z-scored first and
    dimensions whose ``std`` is zero are skipped.
    """
    if a.method != b.method:
        raise MethodMismatch(f"{a.method} vs {b.method}")
    if a.values.size != b.values.size:
        raise LengthMismatch(f"{a.values.size} vs {b.values.size} dimensions")
    return float(_distances(b.values[None, :], a.values, mean, std)[0])


def _distances(refs: np.ndarray, query: np.ndarray, mean=None, std=None) -> np.ndarray:
    diff = refs - query[None, :]
    if std is not None:
        keep = np.asarray(std) > 0
        diff = diff[:, keep] / np.asarray(std)[keep]
    return np.sqrt(np.sum(diff * diff, axis=1))


class TemplateDB:
    """Directory-backed template store.

    Enrollment holds an exclusive file lock on the directory; identification
    only reads the manifest.
    """

    def __init__(self, root, cfg: FrameConfig | None = None):
        self.root = Path(root)
        self.cfg = cfg or FrameConfig()
        self.entries: list[TemplateEntry] = []
        self.normalization: dict[str, dict[str, np.ndarray]] = {}
        if (self.root / MANIFEST).exists():
            self._read()

    @classmethod
    def open(cls, root, cfg: FrameConfig | None = None) -> "TemplateDB":
        root = Path(root)
        if not (root / MANIFEST).exists():
            raise EmptyDatabase(f"{root}: no {MANIFEST}")
        return cls(root, cfg)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def speakers(self) -> list[str]:
        return sorted({e.speaker_id for e in self.entries})

    def _read(self) -> None:
        with open(self.root / MANIFEST, encoding="utf-8") as fh:
            doc = json.load(fh)
        self.entries = [TemplateEntry.from_json(e) for e in doc["entries"]]
        self.normalization = {
            m: {k: np.asarray(v, dtype=np.float64) for k, v in s.items()}
            for m, s in doc.get("normalization", {}).items()
        }

    def _write(self) -> None:
        doc = {
            "format_version": MANIFEST_VERSION,
            "normalization": {m: {k: v.tolist() for k, v in s.items()}
                              for m, s in self.normalization.items()},
            "entries": [e.to_json() for e in self.entries],
        }
        tmp = self.root / (MANIFEST + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
        os.replace(tmp, self.root / MANIFEST)

    def _update_normalization(self) -> None:
        self.normalization = {}
        for m in METHODS:
            vecs = np.array([e.features[m] for e in self.entries if m in e.features])
            if len(vecs):
                mean, std = feature_stats(vecs)
                self.normalization[m] = {"mean": mean, "std": std}

    def enroll(self, speaker_id: str, signal: Signal, keys: KeyPair,
               gain: float = 1.0, enrolled_at: str | None = None) -> TemplateEntry:
        """Encrypt and store ``signal`` and cache its features for every method."""
        if not speaker_id or not speaker_id.strip():
            raise ValueError("speaker_id must be non-empty")
        signal.check_finite()
        digest = signal_digest(signal)
        self.root.mkdir(parents=True, exist_ok=True)
        with FileLock(str(self.root / ".lock")):
            if (self.root / MANIFEST).exists():
                self._read()
            if any(e.speaker_id == speaker_id and e.digest == digest for e in self.entries):
                raise DuplicateTemplate(f"{speaker_id!r} already holds this recording")
            features = {m: extract(signal, m, self.cfg).values for m in METHODS}
            template_id = f"t{len(self.entries):05d}"
            cipher = encrypt(signal, keys, gain=gain)
            cipher.save(self.root / f"{template_id}.vcr")
            entry = TemplateEntry(
                speaker_id=speaker_id,
                template_id=template_id,
                template=f"{template_id}.vcr",
                digest=digest,
                enrolled_at=enrolled_at or datetime.now(timezone.utc).isoformat(timespec="seconds"),
                features=features,
            )
            self.entries.append(entry)
            self._update_normalization()
            self._write()
        return entry

    def feature_matrix(self, method: str) -> np.ndarray:
        return np.array([e.features[method] for e in self.entries])

    def rank(self, query: FeatureVector, normalize: bool = True) -> RankedResult:
        """Rank every template by distance to ``query`` (closed set)."""
        if not self.entries:
            raise EmptyDatabase("no templates enrolled")
        method = query.method
        refs = self.feature_matrix(method)
        if refs.shape[1] != query.values.size:
            raise LengthMismatch(f"query has {query.values.size} dimensions, templates {refs.shape[1]}")
        std = self.normalization[method]["std"] if normalize else None
        dists = _distances(refs, query.values, None, std)
        ranking = sorted(
            ((e.speaker_id, e.template_id, float(d)) for e, d in zip(self.entries, dists)),
            key=lambda r: (r[2], r[0], r[1]),
        )
        return RankedResult(ranking)

    def identify(self, signal: Signal, method: str = "pitch", normalize: bool = True) -> RankedResult:
        if not self.entries:
            raise EmptyDatabase("no templates enrolled")
        if method not in METHODS:
            raise MethodMismatch(f"unknown method {method!r}")
        return self.rank(extract(signal, method, self.cfg), normalize)

    def entry(self, template_id: str) -> TemplateEntry:
        for e in self.entries:
            if e.template_id == template_id:
                return e
        raise KeyError(template_id)

    def load_template(self, template_id: str) -> CipherText:
        return CipherText.load(self.root / self.entry(template_id).template)

    def decrypt_template(self, template_id: str, keys: KeyPair) -> Signal:
        return decrypt(self.load_template(template_id), keys, self.cfg.sample_rate)

    def verify_template(self, template_id: str, keys: KeyPair, method: str = "pitch") -> None:
        """Decrypt a template and check it reproduces the cached features.

        Raises :class:`IntegrityError` on a wrong password or a tampered file.
        """
        entry = self.entry(template_id)
        plain = self.decrypt_template(template_id, keys)
        try:
            fresh = extract(plain, method, self.cfg).values
        except ValueError as exc:
            raise IntegrityError(f"template {template_id} does not decrypt to usable audio") from exc
        if not np.allclose(fresh, entry.features[method], rtol=1e-6, atol=1e-9):
            raise IntegrityError(f"template {template_id} does not match its cached features")


def _labeled_files(root: Path) -> list[tuple[str, Path]]:
    if not root.is_dir():
        raise EmptyDataset(f"{root}: not a directory")
    items = []
    for path in sorted(root.rglob("*")):
        if path.suffix.lower() not in AUDIO_SUFFIXES or not path.is_file():
            continue
        if path.parent == root:
            raise LabelMissing(f"{path}: audio must sit in a per-speaker subdirectory")
        items.append((path.relative_to(root).parts[0], path))
    if not items:
        raise EmptyDataset(f"{root}: no audio files")
    return items


def enroll_directory(db: TemplateDB, enroll_dir, keys: KeyPair) -> int:
    """Enroll every ``<speaker>/<file>.wav`` under ``enroll_dir``."""
    count = 0
    for speaker, path in _labeled_files(Path(enroll_dir)):
        db.enroll(speaker, load(path, db.cfg.sample_rate), keys)
        count += 1
    return count


def accuracy_bench(db_dir, test_dir, methods=METHODS, keys: KeyPair | None = None,
                   cfg: FrameConfig | None = None, normalize: bool = True) -> list[tuple[str, float]]:
    """Identification accuracy (%) per method, best first.

    ``db_dir`` is either an existing template database or a labeled
    directory of enrollment recordings; the latter is enrolled into a
    temporary database with ``keys``.
    """
    import tempfile

    methods = list(methods)
    for m in methods:
        if m not in METHODS:
            raise MethodMismatch(f"unknown method {m!r}")
    tests = _labeled_files(Path(test_dir))
    with tempfile.TemporaryDirectory() as scratch:
        if (Path(db_dir) / MANIFEST).exists():
            db = TemplateDB.open(db_dir, cfg)
        else:
            if keys is None:
                raise ValueError("keys are required to enroll a labeled directory")
            db = TemplateDB(scratch, cfg)
            enroll_directory(db, db_dir, keys)
        if not db.entries:
            raise EmptyDatabase("no templates enrolled")
        signals = [(spk, load(path, db.cfg.sample_rate)) for spk, path in tests]
        table = []
        for m in methods:
            correct = sum(db.identify(sig, m, normalize).decision == spk for spk, sig in signals)
            table.append((m, 100.0 * correct / len(signals)))
    return sorted(table, key=lambda r: (-r[1], methods.index(r[0])))


def accuracy_on_signals(db: TemplateDB, labeled, methods=METHODS, normalize: bool = True):
    """In-memory variant of :func:`accuracy_bench` for ``[(speaker, Signal), ...]``."""
    labeled = list(labeled)
    if not labeled:
        raise EmptyDataset("no test signals")
    methods = list(methods)
    table = []
    for m in methods:
        correct = sum(db.identify(sig, m, normalize).decision == spk for spk, sig in labeled)
        table.append((m, 100.0 * correct / len(labeled)))
    return sorted(table, key=lambda r: (-r[1], methods.index(r[0])))


__all__ = [
    "DIMENSIONS",
    "RankedResult",
    "TemplateDB",
    "TemplateEntry",
    "accuracy_bench",
    "accuracy_on_signals",
    "enroll_directory",
    "euclidean",
]
