"""Bind a key action sequence to concrete scene objects.

Each key primitive is grounded against the sensed scene using the
co-occurrence model: one-object actions take the argmax object, two-object
actions take the ranked pair. The binder walks a holding flag so that the
object in the gripper shapes later queries:

  - the held class is excluded when choosing place/tilt targets,
  - classes already picked earlier in the plan are excluded from later pick
    queries (a demonstration handles each object at most once),
  - tilt while holding needs only a target; the held object is implicit and
    is set down when the pour finishes,
  - rotate grounds to the held object when there is one.

``move`` has no object of its own: it is bound to the pose of the object the
next grounded step works on (an approach waypoint). A trailing move with no
such step is left unbound, which the executor reads as "go to the delivery
zone", standing in for handing the object to a person.

Bound plan slots: pick/rotate carry their object in ``primary``; place and
tilt carry the destination in ``target``; push carries both; move carries an
approach pose in ``target`` or nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .actions import ActionPrimitive, KeySequence
from .knowledge import (
    CooccurrenceModel,
    SelectionError,
    rank_objects,
    select_object_pair,
    select_single_object,
)
from .pose import ObjectPose

NORMAL = "normal"
LOW_CONFIDENCE = "low-confidence"

DEFAULT_CONTAINER_CLASSES = frozenset(
    {"plate", "white plate", "bowl", "cup", "plastic-box", "paper-box"}
)


class BindingError(RuntimeError):
    """Binding failed at a specific plan step."""

    def __init__(self, step_index: int, message: str):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


@dataclass(frozen=True)
class PlannerConfig:
    """Scenario-level planning knobs: which classes count as containers."""

    container_classes: frozenset[str] = DEFAULT_CONTAINER_CLASSES


@dataclass(frozen=True)
class BoundAction:
    primitive: ActionPrimitive
    primary: ObjectPose | None = None
    target: ObjectPose | None = None
    confidence: str = NORMAL

    def anchor(self) -> ObjectPose | None:
        """The pose the end effector must reach to perform this step."""
        return self.primary if self.primary is not None else self.target


@dataclass(frozen=True)
class BoundPlan:
    steps: tuple[BoundAction, ...]
    keys: tuple[ActionPrimitive, ...]  # provenance: the source key sequence

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def arity(primitive: ActionPrimitive, holding: bool) -> int:
    """Number of objects a primitive interacts with.

    pick/place/rotate involve one object; push and tilt involve two, except
    that tilt while holding needs only the pour target because the poured
    object is already in the gripper.
    """
    if primitive in (ActionPrimitive.IDLE, ActionPrimitive.MOVE):
        return 0
    if primitive in (ActionPrimitive.PICK, ActionPrimitive.PLACE, ActionPrimitive.ROTATE):
        return 1
    if primitive == ActionPrimitive.PUSH:
        return 2
    if primitive == ActionPrimitive.TILT:
        return 1 if holding else 2
    raise ValueError(f"unknown primitive {primitive!r}")


def _pose_for(poses: Sequence[ObjectPose], class_name: str) -> ObjectPose:
    for pose in poses:
        if pose.class_name == class_name:
            return pose
    raise KeyError(class_name)


def _flag(*low_confidence: bool) -> str:
    return LOW_CONFIDENCE if any(low_confidence) else NORMAL


def bind_plan(
    keys: KeySequence,
    poses: Sequence[ObjectPose],
    model: CooccurrenceModel,
    config: PlannerConfig = PlannerConfig(),
) -> BoundPlan:
    """Ground every key primitive against the sensed scene poses.

    Raises BindingError when a step cannot be grounded at all (for example a
    two-object action with fewer than two candidate objects). Ill-ordered
    sequences (place before pick) still bind; validate_plan reports them.
    """
    detected = [p.class_name for p in poses]
    detected_set = set(detected)
    holding: str | None = None
    picked: set[str] = set()
    steps: list[BoundAction | None] = []

    for idx, key in enumerate(keys):
        if key == ActionPrimitive.IDLE:
            steps.append(BoundAction(key))
        elif key == ActionPrimitive.MOVE:
            steps.append(None)  # resolved against the next grounded step below
        elif key == ActionPrimitive.PICK:
            candidates = detected_set - picked - ({holding} if holding else set())
            if not candidates:
                raise BindingError(idx, "no candidate object left to pick")
            choice = select_single_object(model, key, candidates)
            steps.append(
                BoundAction(key, primary=_pose_for(poses, choice.name), confidence=_flag(choice.low_confidence))
            )
            picked.add(choice.name)
            holding = choice.name
        elif key == ActionPrimitive.PLACE:
            candidates = detected_set - ({holding} if holding else set())
            if not candidates:
                raise BindingError(idx, "no candidate target for place")
            choice = select_single_object(model, key, candidates)
            steps.append(
                BoundAction(key, target=_pose_for(poses, choice.name), confidence=_flag(choice.low_confidence))
            )
            holding = None
        elif key == ActionPrimitive.ROTATE:
            if holding is not None:
                steps.append(BoundAction(key, primary=_pose_for(poses, holding)))
            else:
                candidates = detected_set - picked
                if not candidates:
                    raise BindingError(idx, "no candidate object to rotate")
                choice = select_single_object(model, key, candidates)
                steps.append(
                    BoundAction(
                        key, primary=_pose_for(poses, choice.name), confidence=_flag(choice.low_confidence)
                    )
                )
        elif key == ActionPrimitive.PUSH:
            candidates = detected_set - picked - ({holding} if holding else set())
            try:
                pair = select_object_pair(model, key, candidates)
            except SelectionError as exc:
                raise BindingError(idx, str(exc)) from None
            steps.append(
                BoundAction(
                    key,
                    primary=_pose_for(poses, pair.primary),
                    target=_pose_for(poses, pair.target),
                    confidence=_flag(pair.low_confidence),
                )
            )
        elif key == ActionPrimitive.TILT:
            candidates = detected_set - picked - ({holding} if holding else set())
            if holding is not None:
                if not candidates:
                    raise BindingError(idx, "no candidate pour target")
                ranked = [o for o in rank_objects(model, key) if o in candidates]
                if ranked:
                    name, low = ranked[0], False
                else:
                    name, low = sorted(candidates)[0], True
                steps.append(BoundAction(key, target=_pose_for(poses, name), confidence=_flag(low)))
                holding = None  # the poured object is set down beside the target
            else:
                try:
                    pair = select_object_pair(model, key, candidates)
                except SelectionError as exc:
                    raise BindingError(idx, str(exc)) from None
                steps.append(
                    BoundAction(
                        key,
                        primary=_pose_for(poses, pair.primary),
                        target=_pose_for(poses, pair.target),
                        confidence=_flag(pair.low_confidence),
                    )
                )
        else:  # pragma: no cover - the enum is closed
            raise BindingError(idx, f"unknown primitive {key!r}")

    # Second pass: each move approaches the next grounded step's anchor.
    resolved: list[BoundAction] = []
    for idx, step in enumerate(steps):
        if step is not None:
            resolved.append(step)
            continue
        approach: ObjectPose | None = None
        for later in steps[idx + 1 :]:
            if later is not None and later.anchor() is not None:
                approach = later.anchor()
                break
        resolved.append(BoundAction(ActionPrimitive.MOVE, target=approach))

    return BoundPlan(steps=tuple(resolved), keys=tuple(keys.keys))


def validate_plan(plan: BoundPlan, config: PlannerConfig = PlannerConfig()) -> list[str]:
    """Check gripper consistency, slot completeness, and container targets.

    Returns an ordered list of human-readable violations; empty means valid.
    """
    violations: list[str] = []
    holding = False
    for idx, step in enumerate(plan.steps):
        p = step.primitive
        if p == ActionPrimitive.IDLE:
            if step.primary is not None or step.target is not None:
                violations.append(f"step {idx}: idle must not carry poses")
        elif p == ActionPrimitive.MOVE:
            if step.primary is not None:
                violations.append(f"step {idx}: move carries a pose in the wrong slot")
        elif p == ActionPrimitive.PICK:
            if step.primary is None:
                violations.append(f"step {idx}: pick has no bound object")
            if holding:
                violations.append(f"step {idx}: pick while holding")
            holding = True
        elif p == ActionPrimitive.PLACE:
            if step.target is None:
                violations.append(f"step {idx}: place has no bound target")
            elif step.target.class_name not in config.container_classes:
                violations.append(
                    f"step {idx}: place target '{step.target.class_name}' is not a container"
                )
            if not holding:
                violations.append(f"step {idx}: place while not holding")
            holding = False
        elif p == ActionPrimitive.PUSH:
            if step.primary is None or step.target is None:
                violations.append(f"step {idx}: push needs two bound objects")
            if holding:
                violations.append(f"step {idx}: push while holding")
        elif p == ActionPrimitive.TILT:
            if step.target is None:
                violations.append(f"step {idx}: tilt has no bound target")
            elif step.target.class_name not in config.container_classes:
                violations.append(
                    f"step {idx}: tilt target '{step.target.class_name}' is not a container"
                )
            if not holding:
                violations.append(f"step {idx}: tilt while not holding")
            holding = False
        elif p == ActionPrimitive.ROTATE:
            if step.primary is None:
                violations.append(f"step {idx}: rotate has no bound object")
    return violations


def _pose_to_json(pose: ObjectPose | None) -> dict | None:
    if pose is None:
        return None
    return {
        "x": pose.x,
        "y": pose.y,
        "theta": pose.theta,
        "class": pose.class_name,
        "degenerate": pose.degenerate,
    }


def _pose_from_json(doc: dict | None) -> ObjectPose | None:
    if doc is None:
        return None
    return ObjectPose(
        x=float(doc["x"]),
        y=float(doc["y"]),
        theta=float(doc["theta"]),
        class_name=str(doc["class"]),
        degenerate=bool(doc.get("degenerate", False)),
    )


def bound_action_to_json(step: BoundAction) -> dict:
    return {
        "primitive": step.primitive.value,
        "primary": _pose_to_json(step.primary),
        "target": _pose_to_json(step.target),
        "confidence": step.confidence,
    }


def plan_to_json(plan: BoundPlan) -> list[dict]:
    return [bound_action_to_json(step) for step in plan.steps]


def dump_plan(plan: BoundPlan, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_json(plan), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_plan(path: str | Path) -> BoundPlan:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise ValueError("plan file must be a JSON list of steps")
    steps = tuple(
        BoundAction(
            primitive=ActionPrimitive.parse(item["primitive"]),
            primary=_pose_from_json(item.get("primary")),
            target=_pose_from_json(item.get("target")),
            confidence=str(item.get("confidence", NORMAL)),
        )
        for item in doc
    )
    return BoundPlan(steps=steps, keys=tuple(s.primitive for s in steps))
