"""Instance serialization: versioned JSON and an extended DIMACS reader/writer.

DIMACS min-cost-flow files use 1-based node ids::

    p min <nodes> <arcs>
    n <id> <supply>
    a <tail> <head> <low> <cap> <cost>
    c fixed <k> <fixed_cost>

The ``c fixed`` comment attaches a fixed cost to the k-th ``a`` line
(1-based, in file order). Arcs without one get a fixed cost of zero, and
plain DIMACS readers ignore these lines.
"""

from __future__ import annotations

import json
from pathlib import Path

from .model import FCNFInstance, InstanceError

SCHEMA_VERSION = 1


class InstanceFormatError(InstanceError):
    pass


def instance_to_dict(instance: FCNFInstance) -> dict:
    # float() of a float64 round-trips exactly through json's repr
    return {
        "version": SCHEMA_VERSION,
        "name": instance.name,
        "uncapacitated": bool(instance.uncapacitated),
        "nodes": [{"id": i, "requirement": float(r)} for i, r in enumerate(instance.requirement)],
        "arcs": [
            {
                "tail": int(t),
                "head": int(h),
                "variable_cost": float(c),
                "fixed_cost": float(f),
                "capacity": float(u),
            }
            for t, h, c, f, u in zip(
                instance.tail,
                instance.head,
                instance.variable_cost,
                instance.fixed_cost,
                instance.capacity,
            )
        ],
    }


def instance_from_dict(data: dict) -> FCNFInstance:
    if not isinstance(data, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    version = data.get("version")
    if version != SCHEMA_VERSION:
        raise InstanceFormatError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
    try:
        nodes = sorted(data["nodes"], key=lambda nd: int(nd["id"]))
        ids = [int(nd["id"]) for nd in nodes]
        if ids != list(range(len(nodes))):
            raise InstanceFormatError("node ids must be exactly 0..n-1")
        arcs = [
            (int(a["tail"]), int(a["head"]), float(a["variable_cost"]), float(a["fixed_cost"]), float(a["capacity"]))
            for a in data["arcs"]
        ]
        requirement = [float(nd["requirement"]) for nd in nodes]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(f"malformed instance document: {exc}") from exc
    return FCNFInstance.from_arcs(
        len(nodes),
        arcs,
        requirement,
        uncapacitated=bool(data.get("uncapacitated", False)),
        name=str(data.get("name", "")),
    )


def save_instance(instance: FCNFInstance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=1) + "\n")


def load_instance(path) -> FCNFInstance:
    path = Path(path)
    if path.suffix.lower() in (".min", ".dimacs", ".dmx"):
        return read_dimacs(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not valid JSON ({exc})") from exc
    return instance_from_dict(data)


def read_dimacs(path) -> FCNFInstance:
    n = None
    requirement: list[float] = []
    arcs: list[list] = []
    fixed: dict[int, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        tag = parts[0]
        try:
            if tag == "c":
                if len(parts) == 4 and parts[1] == "fixed":
                    fixed[int(parts[2]) - 1] = float(parts[3])
            elif tag == "p":
                if parts[1] != "min":
                    raise InstanceFormatError(f"line {lineno}: only 'p min' problems are supported")
                n = int(parts[2])
                requirement = [0.0] * n
            elif tag == "n":
                requirement[int(parts[1]) - 1] = float(parts[2])
            elif tag == "a":
                tail, head, low, cap, cost = parts[1:6]
                if float(low) != 0:
                    raise InstanceFormatError(f"line {lineno}: nonzero lower bounds are not supported")
                arcs.append([int(tail) - 1, int(head) - 1, float(cost), 0.0, float(cap)])
            else:
                raise InstanceFormatError(f"line {lineno}: unknown record {tag!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, InstanceFormatError):
                raise
            raise InstanceFormatError(f"line {lineno}: malformed record {raw!r}") from exc
    if n is None:
        raise InstanceFormatError("missing problem line")
    for k, f in fixed.items():
        if not 0 <= k < len(arcs):
            raise InstanceFormatError(f"fixed cost refers to arc {k + 1}, which does not exist")
        arcs[k][3] = f
    return FCNFInstance.from_arcs(n, [tuple(a) for a in arcs], requirement, name=Path(path).stem)


def write_dimacs(instance: FCNFInstance, path) -> None:
    lines = [f"c fixed-charge network flow instance {instance.name}".rstrip()]
    lines.append(f"p min {instance.node_count} {instance.arc_count}")
    for i, r in enumerate(instance.requirement):
        if r != 0:
            lines.append(f"n {i + 1} {float(r)!r}")
    for k in range(instance.arc_count):
        lines.append(
            f"a {instance.tail[k] + 1} {instance.head[k] + 1} 0 "
            f"{float(instance.capacity[k])!r} {float(instance.variable_cost[k])!r}"
        )
        lines.append(f"c fixed {k + 1} {float(instance.fixed_cost[k])!r}")
    Path(path).write_text("\n".join(lines) + "\n")
