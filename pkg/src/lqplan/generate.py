"""Deterministic random instance generator.

Produces dictionary/profile pairs for tests and benchmarks. Feasible
instances are built by layering: a quantum's prerequisites are drawn only
from KFs already attainable when it is created, so reachability of the
targets holds by construction instead of by rejection sampling. The
random source is Python's Mersenne Twister seeded from the request; the
serialized files, not the generator stream, are the interchange format.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .model import LQCloud, LQDictionary, LQPlanError, LearnerProfile, LearnerQuantum

_TOPICS = (
    "foundations",
    "notation",
    "methods",
    "practice drills",
    "worked examples",
    "survey",
    "applications",
    "review",
    "lab session",
    "case studies",
)

_SEED_MAX = 2**64 - 1


class SpecInvalid(LQPlanError):
    """The generation request violates a GenSpec invariant."""


class Flavor(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    ADVERSARIAL = "adversarial"


@dataclass(frozen=True)
class GenSpec:
    seed: int
    lq_count: int
    kf_count: int
    max_prereqs: int = 3
    max_objectives: int = 2
    flavor: Flavor = Flavor.FEASIBLE


def _check(spec: GenSpec) -> None:
    if not isinstance(spec.seed, int) or not 0 <= spec.seed <= _SEED_MAX:
        raise SpecInvalid(f"seed must be a 64-bit unsigned integer, got {spec.seed!r}")
    if spec.lq_count < 1:
        raise SpecInvalid(f"lq_count must be at least 1, got {spec.lq_count}")
    if spec.kf_count < 2:
        raise SpecInvalid(f"kf_count must be at least 2, got {spec.kf_count}")
    if spec.max_prereqs < 0:
        raise SpecInvalid(f"max_prereqs must be non-negative, got {spec.max_prereqs}")
    if spec.max_objectives < 1:
        raise SpecInvalid(f"max_objectives must be at least 1, got {spec.max_objectives}")
    if not isinstance(spec.flavor, Flavor):
        raise SpecInvalid(f"flavor must be a Flavor, got {spec.flavor!r}")


def generate(spec: GenSpec) -> tuple[LQDictionary, LearnerProfile]:
    """Generate one dictionary/profile pair, a pure function of the request."""
    _check(spec)
    rng = random.Random(spec.seed)
    kf_width = len(str(spec.kf_count))
    lq_width = len(str(spec.lq_count))
    kfs = [f"k{str(i).zfill(kf_width)}" for i in range(1, spec.kf_count + 1)]
    rng.shuffle(kfs)

    orphan: str | None = None
    if spec.flavor is Flavor.INFEASIBLE:
        orphan = kfs.pop()

    trap_kfs: list[str] = []
    trap_quanta = 0
    if (
        spec.flavor is Flavor.ADVERSARIAL
        and len(kfs) >= 5
        and spec.lq_count >= 3
        and spec.max_prereqs >= 1
        and spec.max_objectives >= 1
    ):
        # Reserve two KFs for a mutual-dependency pair appended at the
        # end; smaller requests degrade to plain feasible generation.
        trap_kfs = [kfs.pop(), kfs.pop()]
        trap_quanta = 2

    known_count = rng.randint(1, max(1, len(kfs) // 4))
    known = kfs[:known_count]
    unproduced = deque(kfs[known_count:])
    available = list(known)
    produced: list[str] = []

    quanta: list[LearnerQuantum] = []
    regular_count = spec.lq_count - trap_quanta
    for i in range(1, regular_count + 1):
        want = rng.randint(1, spec.max_objectives)
        objectives = [unproduced.popleft() for _ in range(min(want, len(unproduced)))]
        if objectives:
            prereq_pool = [kf for kf in available if kf not in objectives]
        else:
            # Re-teaching unit: its objectives were produced earlier, so
            # drawing prerequisites from anything produced later would put
            # a second supplier above its consumers and could close a
            # dependency cycle. Prerequisites from the known set keep the
            # whole dictionary's digraph acyclic.
            refresh_pool = produced if produced else available
            objectives = rng.sample(refresh_pool, min(want, len(refresh_pool)))
            prereq_pool = [kf for kf in known if kf not in objectives]
        depth = rng.randint(0, min(spec.max_prereqs, len(prereq_pool)))
        prerequisites = rng.sample(prereq_pool, depth)
        quanta.append(
            LearnerQuantum(
                id=f"q{str(i).zfill(lq_width)}",
                title=f"Unit {i}: {rng.choice(_TOPICS)}",
                prerequisites=frozenset(prerequisites),
                objectives=frozenset(objectives),
                duration_minutes=rng.randrange(10, 125, 5),
                cost=rng.randint(0, 40),
            )
        )
        for kf in objectives:
            if kf not in available:
                available.append(kf)
                produced.append(kf)

    if trap_quanta:
        # Each trap unit requires exactly what the other delivers, plus a
        # tempting real objective, so a cover can be lured into the pair.
        bait = produced if produced else available
        first, second = trap_kfs
        for offset, (needs, makes) in enumerate(((first, second), (second, first))):
            objectives = [makes]
            if spec.max_objectives >= 2:
                objectives.append(rng.choice(bait))
            quanta.append(
                LearnerQuantum(
                    id=f"q{str(regular_count + 1 + offset).zfill(lq_width)}",
                    title=f"Unit {regular_count + 1 + offset}: {rng.choice(_TOPICS)}",
                    prerequisites=frozenset([needs]),
                    objectives=frozenset(objectives),
                    duration_minutes=0,
                    cost=0,
                )
            )

    clouds: tuple[LQCloud, ...] = ()
    if spec.lq_count >= 4 and rng.random() < 0.3:
        ids = [q.id for q in quanta]
        size = rng.randint(2, min(5, len(ids)))
        clouds = (LQCloud("focus", frozenset(rng.sample(ids, size))),)

    target_pool = sorted(set(produced))
    if target_pool:
        target = rng.sample(target_pool, rng.randint(1, min(3, len(target_pool))))
    else:
        target = [rng.choice(known)]
    if orphan is not None:
        target.append(orphan)

    dictionary = LQDictionary(
        subject=f"generated-{spec.seed}",
        quanta=tuple(quanta),
        clouds=clouds,
    )
    profile = LearnerProfile(known=frozenset(known), target=frozenset(target))
    return dictionary, profile
