"""Loaders and containers for pools, model predictions, gold relabels, and label maps.

All containers are immutable after construction and safe for concurrent
reads; loading itself is single-threaded per file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from .errors import ParseError, ValidationError
from .hierarchy import LabelHierarchy

POOL_FORMATS = ("jsonl", "tacred")
_PARTITIONS = ("train", "dev", "test")


class _EliminatedType:
    """Marker for instances removed from the corpus during relabeling."""

    def __repr__(self) -> str:
        return "ELIMINATED"


#: Gold value meaning the instance was dropped rather than relabeled
#: (serialized as JSON null in gold files).
ELIMINATED = _EliminatedType()


@dataclass(frozen=True)
class Instance:
    """One pool sentence: id, current (possibly noisy) label, opaque extras."""

    id: str
    label: str
    partition: str | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)


class ReannotationPool:
    """Ordered, id-unique, non-empty collection of instances eligible for relabeling."""

    def __init__(self, instances: Iterable[Instance]) -> None:
        self._instances = tuple(instances)
        if not self._instances:
            raise ValidationError("pool is empty")
        by_id: dict[str, Instance] = {}
        for inst in self._instances:
            if not inst.id:
                raise ValidationError("instance with empty id")
            if not inst.label:
                raise ValidationError(f"instance {inst.id!r} has an empty label")
            if inst.partition is not None and inst.partition not in _PARTITIONS:
                raise ValidationError(
                    f"instance {inst.id!r} has partition {inst.partition!r}, "
                    f"expected one of {_PARTITIONS}"
                )
            if inst.id in by_id:
                raise ValidationError(f"duplicate instance id: {inst.id!r}")
            by_id[inst.id] = inst
        self._by_id = by_id

    def __len__(self) -> int:
        return len(self._instances)

    def __iter__(self) -> Iterator[Instance]:
        return iter(self._instances)

    def __contains__(self, instance_id: object) -> bool:
        return instance_id in self._by_id

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReannotationPool):
            return NotImplemented
        return self._instances == other._instances

    def ids(self) -> tuple[str, ...]:
        return tuple(self._by_id)

    def get(self, instance_id: str) -> Instance:
        return self._by_id[instance_id]

    def label_of(self, instance_id: str) -> str:
        return self._by_id[instance_id].label

    def labels(self) -> set[str]:
        """Distinct dataset labels occurring in the pool."""
        return {inst.label for inst in self._instances}


@dataclass(frozen=True)
class PredictionRecord:
    """One model's predicted label and confidence for one instance."""

    model_id: str
    instance_id: str
    label: str
    confidence: float


class PredictionSet:
    """Rectangular (model x instance) table of predictions over a pool.

    Every (model, instance) pair must be present exactly once; partial
    ensembles are a hard error because per-instance means over fewer
    models silently change scores.
    """

    def __init__(self, records: Iterable[PredictionRecord], pool: ReannotationPool) -> None:
        table: dict[tuple[str, str], PredictionRecord] = {}
        model_ids: dict[str, None] = {}
        for rec in records:
            model_ids.setdefault(rec.model_id, None)
            if not 0.0 <= rec.confidence <= 1.0:
                raise ValidationError(
                    f"confidence {rec.confidence!r} out of [0, 1] "
                    f"(model {rec.model_id!r}, instance {rec.instance_id!r})"
                )
            if rec.instance_id not in pool:
                raise ValidationError(
                    f"prediction for unknown instance {rec.instance_id!r} "
                    f"(model {rec.model_id!r})"
                )
            key = (rec.model_id, rec.instance_id)
            if key in table:
                raise ValidationError(
                    f"duplicate prediction for model {rec.model_id!r}, "
                    f"instance {rec.instance_id!r}"
                )
            table[key] = rec
        if not table:
            raise ValidationError("no prediction records")
        missing = [
            (m, i) for m in model_ids for i in pool.ids() if (m, i) not in table
        ]
        if missing:
            raise ValidationError(
                f"incomplete predictions: {len(missing)} missing (model, instance) "
                f"pairs, first {missing[0]}"
            )
        self._table = table
        self._model_ids = tuple(model_ids)
        self._pool_ids = pool.ids()

    @property
    def model_ids(self) -> tuple[str, ...]:
        return self._model_ids

    @property
    def k(self) -> int:
        """Ensemble size."""
        return len(self._model_ids)

    def record(self, model_id: str, instance_id: str) -> PredictionRecord:
        return self._table[(model_id, instance_id)]

    def for_instance(self, instance_id: str) -> tuple[PredictionRecord, ...]:
        """All models' records for one instance, in model order."""
        try:
            return tuple(self._table[(m, instance_id)] for m in self._model_ids)
        except KeyError:
            raise ValidationError(f"no predictions for instance {instance_id!r}") from None

    def records_for_model(self, model_id: str) -> tuple[PredictionRecord, ...]:
        """One model's records, in pool order."""
        if model_id not in self._model_ids:
            raise ValidationError(f"unknown model {model_id!r}")
        return tuple(self._table[(model_id, i)] for i in self._pool_ids)

    def labels(self) -> set[str]:
        """Distinct predicted labels across all models."""
        return {rec.label for rec in self._table.values()}


@dataclass(frozen=True)
class GoldRecord:
    """Ground-truth relabel for one instance, or the ELIMINATED marker."""

    instance_id: str
    gold: str | _EliminatedType

    @property
    def is_eliminated(self) -> bool:
        return isinstance(self.gold, _EliminatedType)


class GoldSet:
    """Gold relabels over a pool, with the derived noisy set.

    Instances without a gold record are treated as clean (gold equals the
    dataset label). The noisy set N holds exactly the ids whose gold
    differs from the dataset label or is ELIMINATED.
    """

    def __init__(self, records: Iterable[GoldRecord], pool: ReannotationPool) -> None:
        by_id: dict[str, GoldRecord] = {}
        for rec in records:
            if rec.instance_id not in pool:
                raise ValidationError(f"gold record for unknown instance {rec.instance_id!r}")
            if rec.instance_id in by_id:
                raise ValidationError(f"duplicate gold record for {rec.instance_id!r}")
            if not rec.is_eliminated and not rec.gold:
                raise ValidationError(f"empty gold label for {rec.instance_id!r}")
            by_id[rec.instance_id] = rec
        self._by_id = by_id
        self._pool_ids = frozenset(pool.ids())
        self._noisy = frozenset(
            iid
            for iid, rec in by_id.items()
            if rec.is_eliminated or rec.gold != pool.label_of(iid)
        )

    @property
    def noisy_ids(self) -> frozenset[str]:
        """The noisy set N."""
        return self._noisy

    @property
    def pool_ids(self) -> frozenset[str]:
        return self._pool_ids

    def __len__(self) -> int:
        return len(self._by_id)

    def get(self, instance_id: str) -> GoldRecord | None:
        """The stored record, or None when the instance is implicitly clean."""
        return self._by_id.get(instance_id)

    def records(self) -> tuple[GoldRecord, ...]:
        return tuple(self._by_id.values())

    def covers(self, ids: Iterable[str]) -> bool:
        return self._pool_ids.issuperset(ids)


# -- file loading --------------------------------------------------------


def _read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def _iter_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, record) for each non-blank line; records must be objects."""
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ParseError(f"{path}:{lineno}: record is not an object")
        yield lineno, obj


def _require_str(obj: dict, key: str, where: str) -> str:
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    value = obj[key]
    if not isinstance(value, str):
        raise ParseError(f"{where}: field {key!r} must be a string")
    return value


def _instance_from_record(obj: dict, where: str) -> Instance:
    iid = _require_str(obj, "id", where)
    label = _require_str(obj, "relation", where)
    partition = obj.get("partition")
    if partition is not None:
        if not isinstance(partition, str):
            raise ParseError(f"{where}: field 'partition' must be a string")
        partition = partition.lower()
    metadata = {k: v for k, v in obj.items() if k not in ("id", "relation", "partition")}
    return Instance(iid, label, partition=partition, metadata=metadata)


def load_pool(source: str | Path, format: str = "jsonl") -> ReannotationPool:
    """Load the reannotation pool.

    ``jsonl``: one JSON object per line with fields id and relation
    (optional partition; everything else is kept as opaque metadata).
    ``tacred``: a single JSON array of objects with fields id and relation,
    other fields kept opaquely.
    """
    path = Path(source)
    if format == "jsonl":
        instances = [
            _instance_from_record(obj, f"{path}:{lineno}")
            for lineno, obj in _iter_jsonl(path)
        ]
    elif format == "tacred":
        doc = _read_json(path)
        if not isinstance(doc, list):
            raise ParseError(f"{path}: expected a JSON array of instance objects")
        instances = []
        for i, obj in enumerate(doc):
            if not isinstance(obj, dict):
                raise ParseError(f"{path}: entry {i} is not an object")
            instances.append(_instance_from_record(obj, f"{path}: entry {i}"))
    else:
        raise ValidationError(f"unknown pool format {format!r}, expected one of {POOL_FORMATS}")
    return ReannotationPool(instances)


def write_pool(pool: ReannotationPool, target: str | Path) -> None:
    """Write a pool as jsonl records; round-trips through load_pool."""
    with open(target, "w", encoding="utf-8") as fh:
        for inst in pool:
            obj: dict[str, Any] = {"id": inst.id, "relation": inst.label}
            if inst.partition is not None:
                obj["partition"] = inst.partition
            obj.update(inst.metadata)
            fh.write(json.dumps(obj) + "\n")


def load_predictions(
    sources: Iterable[str | Path], pool: ReannotationPool
) -> PredictionSet:
    """Load one predictions file per model into a rectangular PredictionSet.

    Each jsonl record carries model, id, label, and confidence; a single
    file must not mix model ids.
    """
    records: list[PredictionRecord] = []
    for source in sources:
        path = Path(source)
        file_model: str | None = None
        for lineno, obj in _iter_jsonl(path):
            where = f"{path}:{lineno}"
            model = _require_str(obj, "model", where)
            iid = _require_str(obj, "id", where)
            label = _require_str(obj, "label", where)
            if "confidence" not in obj:
                raise ParseError(f"{where}: missing field 'confidence'")
            conf = obj["confidence"]
            if isinstance(conf, bool) or not isinstance(conf, (int, float)):
                raise ParseError(f"{where}: field 'confidence' must be a number")
            if file_model is None:
                file_model = model
            elif model != file_model:
                raise ValidationError(
                    f"{path}: mixes model ids {file_model!r} and {model!r}; "
                    f"one predictions file per model"
                )
            records.append(PredictionRecord(model, iid, label, float(conf)))
    return PredictionSet(records, pool)


def write_predictions(
    predictions: PredictionSet, model_id: str, target: str | Path
) -> None:
    """Write one model's predictions as jsonl; round-trips through load_predictions."""
    with open(target, "w", encoding="utf-8") as fh:
        for rec in predictions.records_for_model(model_id):
            obj = {
                "model": rec.model_id,
                "id": rec.instance_id,
                "label": rec.label,
                "confidence": rec.confidence,
            }
            fh.write(json.dumps(obj) + "\n")


def load_gold(source: str | Path, pool: ReannotationPool) -> GoldSet:
    """Load gold relabels: jsonl records with fields id and gold (null = eliminated)."""
    path = Path(source)
    records: list[GoldRecord] = []
    for lineno, obj in _iter_jsonl(path):
        where = f"{path}:{lineno}"
        iid = _require_str(obj, "id", where)
        if "gold" not in obj:
            raise ParseError(f"{where}: missing field 'gold'")
        gold = obj["gold"]
        if gold is None:
            records.append(GoldRecord(iid, ELIMINATED))
        elif isinstance(gold, str):
            records.append(GoldRecord(iid, gold))
        else:
            raise ParseError(f"{where}: field 'gold' must be a string or null")
    return GoldSet(records, pool)


def write_gold(gold: GoldSet, target: str | Path) -> None:
    """Write gold records as jsonl; round-trips through load_gold."""
    with open(target, "w", encoding="utf-8") as fh:
        for rec in gold.records():
            value = None if rec.is_eliminated else rec.gold
            fh.write(json.dumps({"id": rec.instance_id, "gold": value}) + "\n")


def load_label_map(source: str | Path) -> dict[str, str]:
    """Load a JSON object mapping original labels to transformed labels."""
    path = Path(source)
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object of label pairs")
    for key, value in doc.items():
        if not isinstance(value, str) or not value:
            raise ParseError(f"{path}: entry {key!r} must map to a non-empty string")
    return dict(doc)


def apply_label_map(pool: ReannotationPool, mapping: Mapping[str, str]) -> ReannotationPool:
    """Replace every instance label by its image; ids and metadata untouched.

    The map must be total over the labels occurring in the pool.
    """
    unmapped = sorted(pool.labels() - mapping.keys())
    if unmapped:
        raise ValidationError("label map has no entry for: " + ", ".join(unmapped))
    return ReannotationPool(
        replace(inst, label=mapping[inst.label]) for inst in pool
    )


def validate_bundle(
    hierarchy: LabelHierarchy,
    pool: ReannotationPool,
    predictions: PredictionSet | None = None,
    gold: GoldSet | None = None,
    label_map: Mapping[str, str] | None = None,
) -> list[str]:
    """Cross-check every loaded label against the hierarchy.

    Returns one problem string per unresolvable label; an empty list means
    the bundle is consistent.
    """
    problems = []
    for label in hierarchy.validate_labels(pool.labels()):
        problems.append(f"dataset label not in hierarchy: {label!r}")
    if predictions is not None:
        for label in hierarchy.validate_labels(predictions.labels()):
            problems.append(f"predicted label not in hierarchy: {label!r}")
    if gold is not None:
        gold_labels = {rec.gold for rec in gold.records() if not rec.is_eliminated}
        for label in hierarchy.validate_labels(gold_labels):
            problems.append(f"gold label not in hierarchy: {label!r}")
    if label_map is not None:
        for label in hierarchy.validate_labels(set(label_map.values())):
            problems.append(f"label map target not in hierarchy: {label!r}")
    return problems
