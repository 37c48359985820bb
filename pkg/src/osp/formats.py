"""JSON instance and schedule files.

Documents are written with sorted keys and a trailing newline so that
serialisation is byte-stable. Unknown fields are rejected and instance data
must be integers; ``metadata`` is free-form.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Union

from .core import Batch, Instance, Job, Machine, Schedule
from .errors import OSPError

VERSION = 1

_INSTANCE_KEYS = {"version", "horizon", "attribute_count", "setup_times", "setup_costs", "machines", "jobs"}
_MACHINE_KEYS = {"id", "capacity", "initial_state", "availability"}
_JOB_KEYS = {"id", "eligible", "et", "mint", "maxt", "size", "attr"}
_SCHEDULE_KEYS = {"version", "instance_ref", "batches"}
_BATCH_KEYS = {"machine", "start", "proc", "jobs"}


class FormatError(OSPError, ValueError):
    """Document does not follow the file format."""


def _int(value: Any, where: str) -> int:
    if type(value) is not int:
        raise FormatError(f"{where}: expected integer, got {value!r}")
    return value


def _int_list(value: Any, where: str) -> list[int]:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected list")
    return [_int(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _keys(obj: Any, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected object")
    missing = required - obj.keys()
    unknown = obj.keys() - required - optional
    if missing:
        raise FormatError(f"{where}: missing fields {sorted(missing)}")
    if unknown:
        raise FormatError(f"{where}: unknown fields {sorted(unknown)}")


def _version(doc: dict, where: str) -> None:
    if _int(doc["version"], f"{where}.version") != VERSION:
        raise FormatError(f"{where}: unsupported version {doc['version']}")


def instance_to_dict(instance: Instance) -> dict:
    doc: dict[str, Any] = {
        "version": VERSION,
        "horizon": instance.horizon,
        "attribute_count": instance.attribute_count,
        "setup_times": [list(r) for r in instance.setup_times],
        "setup_costs": [list(r) for r in instance.setup_costs],
        "machines": [
            {
                "id": m.id,
                "capacity": m.capacity,
                "initial_state": m.initial_state,
                "availability": [list(iv) for iv in m.availability],
            }
            for m in instance.machines
        ],
        "jobs": [],
    }
    for j in instance.jobs:
        row = {
            "id": j.id,
            "eligible": sorted(j.eligible),
            "et": j.et,
            "mint": j.mint,
            "maxt": j.maxt,
            "size": j.size,
            "attr": j.attr,
        }
        if j.lt is not None:
            row["lt"] = j.lt
        doc["jobs"].append(row)
    if instance.metadata is not None:
        doc["metadata"] = instance.metadata
    return doc


def instance_from_dict(doc: Any) -> Instance:
    _keys(doc, _INSTANCE_KEYS, {"metadata"}, "instance")
    _version(doc, "instance")

    def matrix(name: str) -> list[list[int]]:
        rows = doc[name]
        if not isinstance(rows, list):
            raise FormatError(f"{name}: expected list of rows")
        return [_int_list(r, f"{name}[{i}]") for i, r in enumerate(rows)]

    machines = []
    if not isinstance(doc["machines"], list):
        raise FormatError("machines: expected list")
    for i, m in enumerate(doc["machines"]):
        where = f"machines[{i}]"
        _keys(m, _MACHINE_KEYS, set(), where)
        if not isinstance(m["availability"], list):
            raise FormatError(f"{where}.availability: expected list")
        ivs = []
        for q, iv in enumerate(m["availability"]):
            pair = _int_list(iv, f"{where}.availability[{q}]")
            if len(pair) != 2:
                raise FormatError(f"{where}.availability[{q}]: expected [start, end]")
            ivs.append(tuple(pair))
        machines.append(
            Machine(
                _int(m["id"], f"{where}.id"),
                _int(m["capacity"], f"{where}.capacity"),
                _int(m["initial_state"], f"{where}.initial_state"),
                tuple(ivs),
            )
        )
    jobs = []
    if not isinstance(doc["jobs"], list):
        raise FormatError("jobs: expected list")
    for i, j in enumerate(doc["jobs"]):
        where = f"jobs[{i}]"
        _keys(j, _JOB_KEYS, {"lt"}, where)
        jobs.append(
            Job(
                id=_int(j["id"], f"{where}.id"),
                eligible=frozenset(_int_list(j["eligible"], f"{where}.eligible")),
                et=_int(j["et"], f"{where}.et"),
                lt=_int(j["lt"], f"{where}.lt") if "lt" in j else None,
                mint=_int(j["mint"], f"{where}.mint"),
                maxt=_int(j["maxt"], f"{where}.maxt"),
                size=_int(j["size"], f"{where}.size"),
                attr=_int(j["attr"], f"{where}.attr"),
            )
        )
    metadata = doc.get("metadata")
    if metadata is not None and not isinstance(metadata, dict):
        raise FormatError("metadata: expected object")
    return Instance(
        horizon=_int(doc["horizon"], "horizon"),
        attribute_count=_int(doc["attribute_count"], "attribute_count"),
        machines=tuple(machines),
        jobs=tuple(jobs),
        setup_times=matrix("setup_times"),
        setup_costs=matrix("setup_costs"),
        metadata=metadata,
    )


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def canonical_bytes(doc: dict) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def instance_hash(instance: Instance) -> str:
    return "sha256:" + hashlib.sha256(canonical_bytes(instance_to_dict(instance))).hexdigest()


def serialize_instance(instance: Instance) -> str:
    return dumps(instance_to_dict(instance))


def parse_instance(text: Union[str, bytes]) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return instance_from_dict(doc)


def schedule_to_dict(schedule: Schedule, instance_ref: str) -> dict:
    return {
        "version": VERSION,
        "instance_ref": instance_ref,
        "batches": [
            {"machine": b.machine, "start": b.start, "proc": b.proc, "jobs": list(b.jobs)}
            for b in schedule.batches
        ],
    }


def schedule_from_dict(doc: Any) -> tuple[Schedule, str]:
    _keys(doc, _SCHEDULE_KEYS, set(), "schedule")
    _version(doc, "schedule")
    ref = doc["instance_ref"]
    if not isinstance(ref, str):
        raise FormatError("instance_ref: expected string")
    if not isinstance(doc["batches"], list):
        raise FormatError("batches: expected list")
    batches = []
    for i, b in enumerate(doc["batches"]):
        where = f"batches[{i}]"
        _keys(b, _BATCH_KEYS, set(), where)
        batches.append(
            Batch(
                _int(b["machine"], f"{where}.machine"),
                _int(b["start"], f"{where}.start"),
                _int(b["proc"], f"{where}.proc"),
                tuple(_int_list(b["jobs"], f"{where}.jobs")),
            )
        )
    return Schedule(tuple(batches)), ref


def serialize_schedule(schedule: Schedule, instance_ref: str) -> str:
    return dumps(schedule_to_dict(schedule, instance_ref))


def parse_schedule(text: Union[str, bytes]) -> tuple[Schedule, str]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    return schedule_from_dict(doc)


def load_instance(path: Union[str, Path]) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def save_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_instance(instance), encoding="utf-8", newline="\n")


def load_schedule(path: Union[str, Path]) -> tuple[Schedule, str]:
    return parse_schedule(Path(path).read_text(encoding="utf-8"))


def save_schedule(schedule: Schedule, instance_ref: str, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_schedule(schedule, instance_ref), encoding="utf-8", newline="\n")
