"""Per-complication persistence: models + scaler + repair rules in one file.

Bundles are canonical JSON (sorted keys, fixed separators, shortest
round-trip float repr, no trailing newline), so saving the same bundle twice
yields byte-identical files and loading is data-only. Writes go through a
temp file and an atomic rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BundleParseError, BundleVersionError, RecordInvariantError
from .learners import GradientBoostedTrees, NeuralNetClassifier
from .preprocess import IqrBounds, Scaler
from .records import COMPLICATIONS, SCHEMA_VERSION, Complication

BUNDLE_FORMAT = "rescue-triage-bundle"
MANIFEST_NAME = "manifest"


@dataclass(frozen=True)
class RepairRule:
    """Training-set IQR fences plus the in-fence mean used as replacement."""

    bounds: IqrBounds
    replacement: float

    def apply(self, value: float) -> float:
        return value if self.bounds.contains(value) else self.replacement


@dataclass
class ComplicationBundle:
    complication: Complication
    gbt: GradientBoostedTrees
    ann: NeuralNetClassifier
    scaler: Scaler
    repair_rules: dict[str, RepairRule]
    selected_features: tuple[str, ...]
    training_fingerprint: str
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self.selected_features = tuple(self.selected_features)
        for model in (self.gbt, self.ann):
            if tuple(model.feature_names_) != self.selected_features:
                raise RecordInvariantError(
                    f"{model.family} feature names do not match the bundle's selection"
                )


def bundle_filename(complication: Complication) -> str:
    return f"{complication.value}.bundle"


def _canonical_json(document: dict) -> bytes:
    return json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")


def _atomic_write(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_bundle(bundle: ComplicationBundle, path) -> None:
    document = {
        "format": BUNDLE_FORMAT,
        "schema_version": bundle.schema_version,
        "complication": bundle.complication.value,
        "selected_features": list(bundle.selected_features),
        "training_fingerprint": bundle.training_fingerprint,
        "scaler": bundle.scaler.to_state(),
        "repair_rules": {
            name: {"q1": rule.bounds.q1, "q3": rule.bounds.q3, "replacement": rule.replacement}
            for name, rule in bundle.repair_rules.items()
        },
        "gbt": bundle.gbt.to_state(),
        "ann": bundle.ann.to_state(),
    }
    _atomic_write(Path(path), _canonical_json(document))


def load_bundle(path) -> ComplicationBundle:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise BundleParseError(f"cannot read bundle {path}: {exc}") from exc
    try:
        document = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise BundleParseError(f"bundle {path} is not UTF-8", byte_offset=exc.start) from exc
    except json.JSONDecodeError as exc:
        raise BundleParseError(f"bundle {path}: {exc.msg}", byte_offset=exc.pos) from exc

    if not isinstance(document, dict) or document.get("format") != BUNDLE_FORMAT:
        raise BundleParseError(f"bundle {path} has an unrecognized format header")
    version = document.get("schema_version")
    if version != SCHEMA_VERSION:
        raise BundleVersionError(
            f"bundle {path} has schema_version {version}, this build expects {SCHEMA_VERSION}"
        )
    try:
        return ComplicationBundle(
            complication=Complication(document["complication"]),
            gbt=GradientBoostedTrees.from_state(document["gbt"]),
            ann=NeuralNetClassifier.from_state(document["ann"]),
            scaler=Scaler.from_state(document["scaler"]),
            repair_rules={
                name: RepairRule(
                    bounds=IqrBounds(q1=entry["q1"], q3=entry["q3"]),
                    replacement=entry["replacement"],
                )
                for name, entry in document["repair_rules"].items()
            },
            selected_features=tuple(document["selected_features"]),
            training_fingerprint=document["training_fingerprint"],
            schema_version=version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (BundleParseError, BundleVersionError)):
            raise
        raise BundleParseError(f"bundle {path} is structurally invalid: {exc}") from exc


def write_manifest(model_dir) -> Path:
    """List the six expected bundle files, one per line, canonical order."""
    model_dir = Path(model_dir)
    payload = "".join(f"{bundle_filename(c)}\n" for c in COMPLICATIONS).encode("utf-8")
    path = model_dir / MANIFEST_NAME
    _atomic_write(path, payload)
    return path


def read_manifest(model_dir) -> list[str]:
    path = Path(model_dir) / MANIFEST_NAME
    if not path.exists():
        raise BundleParseError(f"manifest not found in {model_dir}")
    return [line for line in path.read_text("utf-8").splitlines() if line]
