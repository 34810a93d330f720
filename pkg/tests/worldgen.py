"""Seeded random worlds and bound actions for simulator fuzzing."""

import math
import random

from demoplan.actions import ActionPrimitive
from demoplan.planner import BoundAction
from demoplan.pose import ObjectPose
from demoplan.sim import CONTAINER, DeliveryZone, Gripper, SimObject, WorldState

CLASSES = ["apple", "banana", "grape", "plastic-box", "paper-box", "blue-bottle"]
KINDS = {"plastic-box": CONTAINER, "paper-box": CONTAINER, "blue-bottle": "bottle"}


def random_world(rng: random.Random) -> WorldState:
    objects = {}
    for i in range(rng.randint(1, 5)):
        cls = rng.choice(CLASSES)
        objects[f"{cls}-{i}"] = SimObject(
            class_name=cls,
            x=rng.uniform(0.0, 0.9),
            y=rng.uniform(0.0, 0.9),
            theta=rng.uniform(0.0, math.pi),
            radius=rng.uniform(0.02, 0.08),
            kind=KINDS.get(cls, "item"),
        )
    zone = DeliveryZone(rng.uniform(0, 0.9), rng.uniform(0, 0.9), 0.08) if rng.random() < 0.5 else None
    gripper = Gripper(x=rng.uniform(0, 0.9), y=rng.uniform(0, 0.9))
    if objects and rng.random() < 0.3:
        held = rng.choice(sorted(objects))
        o = objects[held]
        gripper = Gripper(x=o.x, y=o.y, holding=held, closed=True)
    return WorldState(width=0.9, height=0.9, objects=objects, gripper=gripper, zone=zone)


def random_action(rng: random.Random, world: WorldState) -> BoundAction:
    primitive = rng.choice(list(ActionPrimitive))
    classes = sorted({o.class_name for o in world.objects.values()}) or ["apple"]

    def maybe_pose():
        if rng.random() < 0.15:
            return None
        return ObjectPose(
            x=rng.uniform(-0.2, 1.1),
            y=rng.uniform(-0.2, 1.1),
            theta=0.0,
            class_name=rng.choice(classes + ["ghost"]),
        )

    return BoundAction(primitive, primary=maybe_pose(), target=maybe_pose())
