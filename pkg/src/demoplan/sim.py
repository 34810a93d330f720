"""Deterministic 2D tabletop world executing bound plans step by step.

Motion is teleport-style: each primitive rewrites poses directly, with no
kinematics or time integration. Semantics per primitive:

  idle    no-op.
  move    gripper (and held object, and that object's contents if it is a
          container) translates to the bound pose; with no bound pose it
          goes to the delivery zone, and arriving at the zone releases the
          held object, standing in for handing it over.
  pick    requires an empty gripper within reach of the bound object; the
          gripper closes on it and the object tracks the gripper afterward.
  place   requires a held object and a container target; the object is set
          at the container center and recorded as inside it, so it rides
          along when the container later moves.
  push    requires an empty gripper; the bound object translates along the
          line toward the target object until their separation equals the
          contact distance.
  tilt    requires a held object and a container target within reach; marks
          a poured-into relation and sets the held object down on the spot.
  rotate  turns the bound object's cap by the configured angle; enough
          accumulated turn marks the object opened.

Every primitive either returns a new world or a failure reason with the
world untouched, so a failed step is atomic. At most one object is held at
any time and its position equals the gripper position.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from .actions import ActionPrimitive
from .planner import BoundAction, BoundPlan, bound_action_to_json

ITEM = "item"
CONTAINER = "container"
BOTTLE = "bottle"
KINDS = (ITEM, CONTAINER, BOTTLE)

_SEP_TOL = 1e-9


@dataclass(frozen=True)
class SimConfig:
    """Execution thresholds; all lengths in meters, angles in radians."""

    reach: float = 0.05
    contact: float = 0.04
    cap_turn_angle: float = 6.0 * math.pi  # three full turns per rotate step
    open_turn_angle: float = 6.0 * math.pi  # accumulated turn that counts as opened


@dataclass(frozen=True)
class SimObject:
    class_name: str
    x: float
    y: float
    theta: float
    radius: float
    kind: str = ITEM
    turned: float = 0.0
    opened: bool = False


@dataclass(frozen=True)
class Gripper:
    x: float
    y: float
    holding: str | None = None
    closed: bool = False


@dataclass(frozen=True)
class DeliveryZone:
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class WorldState:
    width: float
    height: float
    objects: Mapping[str, SimObject]
    gripper: Gripper
    zone: DeliveryZone | None = None
    inside: Mapping[str, str] = field(default_factory=dict)  # object id -> container id
    poured: frozenset[tuple[str, str]] = frozenset()
    clock: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", dict(self.objects))
        object.__setattr__(self, "inside", dict(self.inside))
        object.__setattr__(self, "poured", frozenset(self.poured))


@dataclass(frozen=True)
class TaskSpec:
    """Success predicate parameters for one task."""

    kind: str
    object_class: str | None = None
    target_class: str | None = None
    containment_radius: float | None = None
    separation: float | None = None
    parts: tuple["TaskSpec", ...] = ()


@dataclass(frozen=True)
class TraceStep:
    index: int
    action: BoundAction
    pre_digest: str
    post_digest: str
    outcome: str  # "ok" or "failed"
    reason: str | None = None


@dataclass(frozen=True)
class ExecutionTrace:
    steps: tuple[TraceStep, ...]

    @property
    def all_ok(self) -> bool:
        return all(s.outcome == "ok" for s in self.steps)

    @property
    def failure(self) -> TraceStep | None:
        for s in self.steps:
            if s.outcome == "failed":
                return s
        return None


def digest(world: WorldState) -> str:
    """Deterministic hash of the full world state."""
    doc = {
        "width": world.width,
        "height": world.height,
        "clock": world.clock,
        "gripper": [world.gripper.x, world.gripper.y, world.gripper.holding, world.gripper.closed],
        "zone": None if world.zone is None else [world.zone.x, world.zone.y, world.zone.radius],
        "inside": dict(sorted(world.inside.items())),
        "poured": sorted(world.poured),
        "objects": {
            oid: [o.class_name, o.x, o.y, o.theta, o.radius, o.kind, o.turned, o.opened]
            for oid, o in sorted(world.objects.items())
        },
    }
    payload = json.dumps(doc, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _dist(ax: float, ay: float, bx: float, by: float) -> float:
    return math.hypot(ax - bx, ay - by)


def _resolve(world: WorldState, class_name: str, near_x: float, near_y: float) -> str | None:
    """Nearest world object of the given class to the bound pose; ties by id."""
    best: tuple[float, str] | None = None
    for oid in sorted(world.objects):
        obj = world.objects[oid]
        if obj.class_name != class_name:
            continue
        d = _dist(obj.x, obj.y, near_x, near_y)
        if best is None or d < best[0]:
            best = (d, oid)
    return None if best is None else best[1]


def _contents(world: WorldState, container_id: str) -> set[str]:
    """Ids riding inside a container, following nesting."""
    out: set[str] = set()
    frontier = [container_id]
    while frontier:
        cid = frontier.pop()
        for oid, parent in world.inside.items():
            if parent == cid and oid not in out:
                out.add(oid)
                frontier.append(oid)
    return out


def _translate_group(world: WorldState, ids: Iterable[str], dx: float, dy: float) -> dict[str, SimObject]:
    objects = dict(world.objects)
    for oid in ids:
        obj = objects[oid]
        objects[oid] = replace(obj, x=obj.x + dx, y=obj.y + dy)
    return objects


def _in_bounds(world: WorldState, objects: Mapping[str, SimObject]) -> bool:
    return all(0.0 <= o.x <= world.width and 0.0 <= o.y <= world.height for o in objects.values())


def _ok(world: WorldState) -> tuple[WorldState, None]:
    return replace(world, clock=world.clock + 1), None


def _fail(world: WorldState, reason: str) -> tuple[WorldState, str]:
    return world, reason


def apply_primitive(
    world: WorldState, act: BoundAction, cfg: SimConfig = SimConfig()
) -> tuple[WorldState, str | None]:
    """Execute one bound primitive.

    Returns (new world, None) on success or (unchanged world, reason) on a
    precondition failure.
    """
    p = act.primitive

    if p == ActionPrimitive.IDLE:
        return _ok(world)

    if p == ActionPrimitive.MOVE:
        dest = act.anchor()
        if dest is not None:
            dx, dy = dest.x, dest.y
        elif world.zone is not None:
            dx, dy = world.zone.x, world.zone.y
        else:
            return _fail(world, "move has no destination and the world has no delivery zone")
        gripper = replace(world.gripper, x=dx, y=dy)
        objects = dict(world.objects)
        if world.gripper.holding is not None:
            held = world.gripper.holding
            ddx, ddy = dx - objects[held].x, dy - objects[held].y
            objects = _translate_group(world, _contents(world, held), ddx, ddy)
            # the held object lands on the gripper exactly, not within an ulp
            objects[held] = replace(objects[held], x=dx, y=dy)
        handover = world.zone is not None and _dist(dx, dy, world.zone.x, world.zone.y) <= world.zone.radius
        if handover and gripper.holding is not None:
            gripper = replace(gripper, holding=None, closed=False)
        if not _in_bounds(world, objects):
            return _fail(world, "move would push an object out of the workspace")
        return _ok(replace(world, gripper=gripper, objects=objects))

    if p == ActionPrimitive.PICK:
        if act.primary is None:
            return _fail(world, "pick has no bound object")
        if world.gripper.holding is not None:
            return _fail(world, f"pick while holding {world.gripper.holding}")
        oid = _resolve(world, act.primary.class_name, act.primary.x, act.primary.y)
        if oid is None:
            return _fail(world, f"no {act.primary.class_name} in the world")
        obj = world.objects[oid]
        d = _dist(world.gripper.x, world.gripper.y, obj.x, obj.y)
        if d > cfg.reach:
            return _fail(world, f"{oid} out of reach (d={d:.3f} m > {cfg.reach} m)")
        gripper = replace(world.gripper, x=obj.x, y=obj.y, holding=oid, closed=True)
        inside = {k: v for k, v in world.inside.items() if k != oid}
        return _ok(replace(world, gripper=gripper, inside=inside))

    if p == ActionPrimitive.PLACE:
        if world.gripper.holding is None:
            return _fail(world, "place while not holding")
        if act.target is None:
            return _fail(world, "place has no bound target")
        cid = _resolve(world, act.target.class_name, act.target.x, act.target.y)
        if cid is None:
            return _fail(world, f"no {act.target.class_name} in the world")
        container = world.objects[cid]
        if container.kind != CONTAINER:
            return _fail(world, f"place target {cid} is not a container")
        held = world.gripper.holding
        if held == cid:
            return _fail(world, "cannot place an object into itself")
        ddx, ddy = container.x - world.objects[held].x, container.y - world.objects[held].y
        objects = _translate_group(world, _contents(world, held), ddx, ddy)
        objects[held] = replace(objects[held], x=container.x, y=container.y)
        if not _in_bounds(world, objects):
            return _fail(world, "place would push an object out of the workspace")
        inside = dict(world.inside)
        inside[held] = cid
        gripper = replace(world.gripper, x=container.x, y=container.y, holding=None, closed=False)
        return _ok(replace(world, objects=objects, gripper=gripper, inside=inside))

    if p == ActionPrimitive.PUSH:
        if act.primary is None or act.target is None:
            return _fail(world, "push needs two bound objects")
        if world.gripper.holding is not None:
            return _fail(world, "push while holding")  # the gripper body does the pushing
        pid = _resolve(world, act.primary.class_name, act.primary.x, act.primary.y)
        tid = _resolve(world, act.target.class_name, act.target.x, act.target.y)
        if pid is None or tid is None:
            missing = act.primary.class_name if pid is None else act.target.class_name
            return _fail(world, f"no {missing} in the world")
        if pid == tid:
            return _fail(world, "push needs two distinct objects")
        po, to = world.objects[pid], world.objects[tid]
        d = _dist(po.x, po.y, to.x, to.y)
        if d <= cfg.contact:
            return _ok(replace(world, gripper=replace(world.gripper, x=po.x, y=po.y)))
        if d == 0.0:
            return _fail(world, "push objects are coincident")
        ux, uy = (to.x - po.x) / d, (to.y - po.y) / d
        nx, ny = to.x - cfg.contact * ux, to.y - cfg.contact * uy
        group = {pid} | (_contents(world, pid) if po.kind == CONTAINER else set())
        objects = _translate_group(world, group, nx - po.x, ny - po.y)
        if not _in_bounds(world, objects):
            return _fail(world, "push would leave the workspace")
        gripper = replace(world.gripper, x=nx, y=ny)
        return _ok(replace(world, objects=objects, gripper=gripper))

    if p == ActionPrimitive.TILT:
        if world.gripper.holding is None:
            return _fail(world, "tilt while not holding")
        if act.target is None:
            return _fail(world, "tilt has no bound target")
        tid = _resolve(world, act.target.class_name, act.target.x, act.target.y)
        if tid is None:
            return _fail(world, f"no {act.target.class_name} in the world")
        target = world.objects[tid]
        if target.kind != CONTAINER:
            return _fail(world, f"tilt target {tid} is not a container")
        held = world.gripper.holding
        if held == tid:
            return _fail(world, "cannot pour an object into itself")
        d = _dist(world.gripper.x, world.gripper.y, target.x, target.y)
        if d > cfg.reach:
            return _fail(world, f"{tid} out of reach (d={d:.3f} m > {cfg.reach} m)")
        poured = world.poured | {(held, tid)}
        # pouring done: set the object down where it is and open the gripper
        gripper = replace(world.gripper, holding=None, closed=False)
        return _ok(replace(world, poured=poured, gripper=gripper))

    if p == ActionPrimitive.ROTATE:
        if act.primary is None:
            return _fail(world, "rotate has no bound object")
        oid = _resolve(world, act.primary.class_name, act.primary.x, act.primary.y)
        if oid is None:
            return _fail(world, f"no {act.primary.class_name} in the world")
        obj = world.objects[oid]
        if world.gripper.holding != oid:
            d = _dist(world.gripper.x, world.gripper.y, obj.x, obj.y)
            if d > cfg.reach:
                return _fail(world, f"{oid} out of reach (d={d:.3f} m > {cfg.reach} m)")
        turned = obj.turned + cfg.cap_turn_angle
        objects = dict(world.objects)
        objects[oid] = replace(
            obj,
            theta=(obj.theta + cfg.cap_turn_angle) % (2.0 * math.pi),
            turned=turned,
            opened=obj.opened or turned >= cfg.open_turn_angle - _SEP_TOL,
        )
        return _ok(replace(world, objects=objects))

    raise ValueError(f"unknown primitive {p!r}")  # pragma: no cover


def run_plan(
    world: WorldState, plan: BoundPlan, cfg: SimConfig = SimConfig()
) -> tuple[ExecutionTrace, WorldState]:
    """Apply plan steps in order, halting at the first failure."""
    steps: list[TraceStep] = []
    current = world
    for idx, act in enumerate(plan.steps):
        pre = digest(current)
        nxt, reason = apply_primitive(current, act, cfg)
        post = digest(nxt)
        if reason is None:
            steps.append(TraceStep(idx, act, pre, post, "ok"))
            current = nxt
        else:
            steps.append(TraceStep(idx, act, pre, post, "failed", reason))
            break
    return ExecutionTrace(steps=tuple(steps)), current


def _classes(world: WorldState, class_name: str) -> list[SimObject]:
    return [o for oid, o in sorted(world.objects.items()) if o.class_name == class_name]


def check_success(trace: ExecutionTrace, final: WorldState, spec: TaskSpec, cfg: SimConfig = SimConfig()) -> bool:
    """Evaluate the task's geometric/symbolic success predicate on the end state."""
    kind = spec.kind
    if kind == "composite":
        return all(check_success(trace, final, part, cfg) for part in spec.parts)
    if kind == "pick-place":
        movers = _classes(final, spec.object_class or "")
        containers = _classes(final, spec.target_class or "")
        for mover in movers:
            for container in containers:
                radius = spec.containment_radius if spec.containment_radius is not None else container.radius
                if _dist(mover.x, mover.y, container.x, container.y) <= radius + _SEP_TOL:
                    return True
        return False
    if kind == "push-away":
        sep = spec.separation if spec.separation is not None else cfg.contact
        for mover in _classes(final, spec.object_class or ""):
            for goal in _classes(final, spec.target_class or ""):
                if mover is goal:
                    continue
                if _dist(mover.x, mover.y, goal.x, goal.y) <= sep + _SEP_TOL:
                    return True
        return False
    if kind == "open-bottle":
        return any(o.opened for o in _classes(final, spec.object_class or ""))
    if kind == "pour":
        for src, dst in final.poured:
            so, do = final.objects.get(src), final.objects.get(dst)
            if so is None or do is None:
                continue
            if so.class_name == spec.object_class and do.class_name == spec.target_class:
                return True
        return False
    if kind == "deliver":
        if final.zone is None:
            return False
        return any(
            _dist(o.x, o.y, final.zone.x, final.zone.y) <= final.zone.radius + _SEP_TOL
            for o in _classes(final, spec.object_class or "")
        )
    raise ValueError(f"unknown task kind {kind!r}")


def _task_from_json(doc: dict) -> TaskSpec:
    return TaskSpec(
        kind=str(doc["kind"]),
        object_class=doc.get("object_class"),
        target_class=doc.get("target_class"),
        containment_radius=doc.get("containment_radius"),
        separation=doc.get("separation"),
        parts=tuple(_task_from_json(part) for part in doc.get("parts", ())),
    )


def load_scenario(path: str | Path) -> tuple[WorldState, TaskSpec, SimConfig]:
    """Read a scenario file into a world, its task spec, and thresholds."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    width, height = (float(v) for v in doc["workspace"])
    if width <= 0 or height <= 0:
        raise ValueError("workspace dimensions must be positive")
    objects: dict[str, SimObject] = {}
    for obj in doc["objects"]:
        kind = str(obj.get("kind", ITEM))
        if kind not in KINDS:
            raise ValueError(f"object {obj.get('id')!r} has unknown kind {kind!r}")
        x, y, theta = (float(v) for v in obj["pose"])
        if not (0.0 <= x <= width and 0.0 <= y <= height):
            raise ValueError(f"object {obj.get('id')!r} lies outside the workspace")
        radius = float(obj["radius"])
        if radius <= 0:
            raise ValueError(f"object {obj.get('id')!r} needs a positive radius")
        objects[str(obj["id"])] = SimObject(
            class_name=str(obj["class"]),
            x=x,
            y=y,
            theta=theta,
            radius=radius,
            kind=kind,
        )
    zone = None
    if doc.get("delivery_zone"):
        z = doc["delivery_zone"]
        zone = DeliveryZone(x=float(z["pose"][0]), y=float(z["pose"][1]), radius=float(z["radius"]))
    gx, gy = (float(v) for v in doc.get("gripper_start", (0.0, 0.0)))
    thresholds = doc.get("thresholds", {})
    cfg = SimConfig(
        reach=float(thresholds.get("reach", SimConfig.reach)),
        contact=float(thresholds.get("contact", SimConfig.contact)),
        cap_turn_angle=float(thresholds.get("cap_turn_angle", SimConfig.cap_turn_angle)),
        open_turn_angle=float(thresholds.get("open_turn_angle", SimConfig.open_turn_angle)),
    )
    task = _task_from_json(doc["task"])
    if task.kind == "push-away" and task.separation is None:
        task = replace(task, separation=cfg.contact)
    world = WorldState(
        width=width,
        height=height,
        objects=objects,
        gripper=Gripper(x=gx, y=gy),
        zone=zone,
    )
    return world, task, cfg


def trace_to_jsonl(trace: ExecutionTrace) -> str:
    """One JSON object per executed step."""
    lines = []
    for step in trace.steps:
        lines.append(
            json.dumps(
                {
                    "step": step.index,
                    "action": bound_action_to_json(step.action),
                    "pre": step.pre_digest,
                    "post": step.post_digest,
                    "outcome": step.outcome,
                    "reason": step.reason,
                },
                sort_keys=True,
            )
        )
    return "\n".join(lines) + ("\n" if lines else "")
