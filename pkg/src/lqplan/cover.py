"""Minimal-cover selection and iterative backward resolution.

Planning works backwards from the learner's targets: pick a lightest set
of quanta whose objectives cover the targets, then treat the unmet
prerequisites of that pick as the next round's targets, and repeat until
nothing is left. Each round is a weighted set-cover instance, solved
either exactly (branch and bound) or greedily.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .model import (
    KFSet,
    LQDictionary,
    LQPlanError,
    LearnerProfile,
    LearnerQuantum,
    MinimalityMetric,
    closure_over,
    effective_targets,
)

GLOBAL_SEARCH_BOUND = 20


class CoverMode(Enum):
    EXACT = "exact"
    GREEDY = "greedy"


@dataclass(frozen=True)
class CoverConfig:
    """Knobs for one planning query.

    ``reuse_acquired_objectives`` controls whether KFs delivered by
    already-selected quanta count as held when computing later residuals;
    switching it off follows the strictest reading of backward chaining,
    at the price of occasionally redundant picks or dead ends.
    ``max_exact_candidates`` caps the branch-and-bound pool size; larger
    pools must use greedy mode.
    """

    metric: MinimalityMetric = MinimalityMetric.COUNT
    mode: CoverMode = CoverMode.EXACT
    reuse_acquired_objectives: bool = True
    max_exact_candidates: int = 25


@dataclass(frozen=True)
class IterationRecord:
    """One round of backward resolution.

    ``prereq_union`` is everything the newly selected quanta require;
    ``residual`` is the part of that still unaccounted for, which the next
    round must cover. ``index`` starts at 1.
    """

    index: int
    selected: frozenset[str]
    k: int
    prereq_union: KFSet
    residual: KFSet


@dataclass(frozen=True)
class SolutionTrace:
    """Full record of a backward resolution run.

    ``solution`` lists the chosen LQ ids in selection order (iteration by
    iteration, alphabetical within one); ``cardinality`` is its length.
    """

    iterations: tuple[IterationRecord, ...]
    solution: tuple[str, ...]
    cardinality: int


@dataclass(frozen=True)
class GapReport:
    """Counseling result for one quantum: what is missing and whether the
    dictionary can supply it."""

    lq_id: str
    missing: KFSet
    satisfiable: bool


class NoCover(LQPlanError):
    """No subset of the candidates covers the requested targets."""

    def __init__(self, uncovered: KFSet):
        self.uncovered = frozenset(uncovered)
        super().__init__(f"no candidate covers: {', '.join(sorted(self.uncovered))}")


class ExactTooLarge(LQPlanError):
    """Exact mode was asked to search a pool beyond its configured cap."""

    def __init__(self, count: int, bound: int):
        self.count = count
        self.bound = bound
        super().__init__(
            f"exact cover over {count} relevant candidates exceeds the cap of {bound}; "
            "retry in greedy mode"
        )


class TooLarge(LQPlanError):
    """Exhaustive whole-plan search was asked for too many candidates."""

    def __init__(self, count: int, bound: int):
        self.count = count
        self.bound = bound
        super().__init__(f"exhaustive plan search over {count} candidates exceeds the cap of {bound}")


class Infeasible(LQPlanError):
    """The dictionary cannot take this learner to these targets.

    ``stage`` 0 means the up-front reachability check failed; stage g >= 1
    means round g of backward resolution found no cover for its residual.
    """

    def __init__(self, stage: int, uncovered: KFSet):
        self.stage = stage
        self.uncovered = frozenset(uncovered)
        super().__init__(
            f"Infeasible at stage {stage}: uncovered = {', '.join(sorted(self.uncovered))}"
        )


def total_weight(quanta: Iterable[LearnerQuantum], metric: MinimalityMetric) -> int:
    return sum(metric.weight(q) for q in quanta)


def _unmet_count(quanta: Iterable[LearnerQuantum], known: KFSet) -> int:
    unmet: set[str] = set()
    for q in quanta:
        unmet |= q.prerequisites - known
    return len(unmet)


def _selection_key(
    chosen: Iterable[LearnerQuantum], known: KFSet, metric: MinimalityMetric
) -> tuple[int, int, tuple[str, ...]]:
    """The deterministic preference order for covers.

    Lighter total weight wins; among equals, fewer prerequisite KFs
    outside ``known``; among those, the lexicographically smallest sorted
    id sequence. Every selection point in this module uses this chain, so
    identical inputs always yield identical picks.
    """
    chosen = list(chosen)
    return (
        total_weight(chosen, metric),
        _unmet_count(chosen, known),
        tuple(sorted(q.id for q in chosen)),
    )


def minimal_cover(
    targets: KFSet,
    candidates: Iterable[LearnerQuantum],
    known: KFSet,
    config: CoverConfig,
) -> frozenset[str]:
    """Pick a set of candidates whose objectives cover ``targets``.

    Only candidates whose objectives intersect the targets take part.
    Exact mode returns the cover minimising the selection key; greedy mode
    repeatedly takes the best coverage-per-weight candidate and may
    overshoot the minimum. Exact minimality is over covers with no
    free-riding member (dropping a zero-weight unit that contributes no
    coverage is never worse under the key's first two components).
    """
    targets = frozenset(targets)
    known = frozenset(known)
    if targets & known:
        raise ValueError(f"targets overlap the known set: {sorted(targets & known)}")
    if not targets:
        return frozenset()
    pool = sorted((q for q in candidates if q.objectives & targets), key=lambda q: q.id)
    coverable: set[str] = set()
    for q in pool:
        coverable |= q.objectives & targets
    if coverable != targets:
        raise NoCover(targets - coverable)
    if config.mode is CoverMode.GREEDY:
        return _greedy_cover(targets, pool, known, config.metric)
    if len(pool) > config.max_exact_candidates:
        raise ExactTooLarge(len(pool), config.max_exact_candidates)
    return _exact_cover(targets, pool, known, config.metric)


def _greedy_cover(
    targets: KFSet,
    pool: Sequence[LearnerQuantum],
    known: KFSet,
    metric: MinimalityMetric,
) -> frozenset[str]:
    remaining = set(targets)
    chosen: list[LearnerQuantum] = []
    chosen_ids: set[str] = set()
    while remaining:
        best: LearnerQuantum | None = None
        best_gain = 0
        best_weight = 1
        best_unmet = 0
        for q in pool:
            if q.id in chosen_ids:
                continue
            gain = len(q.objectives & remaining)
            if gain == 0:
                continue
            # Ratio comparison by cross-multiplication keeps this in exact
            # integer arithmetic; a zero weight counts as 1 here so the
            # ratio stays defined (the exact solver still sums it as 0).
            weight = metric.weight(q) or 1
            unmet = len(q.prerequisites - known)
            if best is None:
                better = True
            elif gain * best_weight != best_gain * weight:
                better = gain * best_weight > best_gain * weight
            elif unmet != best_unmet:
                better = unmet < best_unmet
            else:
                better = q.id < best.id
            if better:
                best, best_gain, best_weight, best_unmet = q, gain, weight, unmet
        if best is None:
            raise NoCover(frozenset(remaining))
        chosen.append(best)
        chosen_ids.add(best.id)
        remaining -= best.objectives
    return frozenset(chosen_ids)


def _exact_cover(
    targets: KFSet,
    pool: Sequence[LearnerQuantum],
    known: KFSet,
    metric: MinimalityMetric,
) -> frozenset[str]:
    """Branch and bound over the candidate pool.

    Targets are mapped to bit positions so coverage tests are single mask
    operations. Branching is on the uncovered target with the fewest
    usable candidates; the i-th option is explored with all earlier
    options banned, which partitions the search space and visits every
    cover that has no free-riding member exactly once. A branch is cut
    only when its weight lower bound strictly exceeds the incumbent, so
    equal-weight covers survive for the tie-break comparison at the leaf.
    """
    target_list = sorted(targets)
    bit_of = {kf: i for i, kf in enumerate(target_list)}
    full = (1 << len(target_list)) - 1

    cover_mask = []
    weights = []
    for q in pool:
        mask = 0
        for kf in q.objectives & targets:
            mask |= 1 << bit_of[kf]
        cover_mask.append(mask)
        weights.append(metric.weight(q))

    greedy_ids = _greedy_cover(targets, pool, known, metric)
    best_set = [q for q in pool if q.id in greedy_ids]
    best_key = _selection_key(best_set, known, metric)

    n = len(pool)
    all_allowed = (1 << n) - 1

    def candidates_for(bit: int, allowed: int) -> list[int]:
        return [i for i in range(n) if allowed >> i & 1 and cover_mask[i] >> bit & 1]

    def bound(covered: int, allowed: int) -> int | None:
        worst = 0
        for bit in range(len(target_list)):
            if covered >> bit & 1:
                continue
            cheapest = None
            for i in range(n):
                if allowed >> i & 1 and cover_mask[i] >> bit & 1:
                    w = weights[i]
                    if cheapest is None or w < cheapest:
                        cheapest = w
                        if w == 0:
                            break
            if cheapest is None:
                return None
            worst = max(worst, cheapest)
        return worst

    def search(covered: int, allowed: int, chosen: list[int], weight: int) -> None:
        nonlocal best_key, best_set
        if covered == full:
            selection = [pool[i] for i in chosen]
            key = _selection_key(selection, known, metric)
            if key < best_key:
                best_key = key
                best_set = selection
            return
        extra = bound(covered, allowed)
        if extra is None or weight + extra > best_key[0]:
            return
        branch_bit = -1
        branch_options: list[int] = []
        for bit in range(len(target_list)):
            if covered >> bit & 1:
                continue
            options = candidates_for(bit, allowed)
            if branch_bit < 0 or len(options) < len(branch_options):
                branch_bit = bit
                branch_options = options
        banned = 0
        for i in branch_options:
            search(covered | cover_mask[i], allowed & ~banned & ~(1 << i), chosen + [i], weight + weights[i])
            banned |= 1 << i
    # Note: `allowed & ~banned` must exclude options tried earlier at this
    # node, so the mask passed down bans them as the loop advances.

    search(0, all_allowed, [], 0)
    return frozenset(q.id for q in best_set)


def backward_resolve(
    profile: LearnerProfile,
    dictionary: LQDictionary,
    scope: str | None = None,
    config: CoverConfig = CoverConfig(),
) -> SolutionTrace:
    """Resolve a learner's targets into a set of quanta, backwards.

    Round 1 covers the targets the learner does not hold. Each later
    round covers the previous round's residual prerequisites, drawing only
    on quanta not yet selected. The loop ends when a residual comes up
    empty. An up-front reachability check (can the targets be reached from
    the known set at all, taking every quantum in the scope) turns
    obviously hopeless queries into ``Infeasible`` at stage 0 rather than
    letting them fail mid-resolution with a less useful message.
    """
    if not profile.target:
        raise ValueError("planning query requires a non-empty target set")
    candidates = dictionary.scoped(scope)
    wanted = effective_targets(profile)
    if not wanted:
        return SolutionTrace((), (), 0)
    attainable = closure_over(profile.known, candidates)
    if not wanted <= attainable:
        raise Infeasible(0, wanted - attainable)

    by_id = {q.id: q for q in candidates}
    acquired: frozenset[str] = frozenset()
    selected_ids: set[str] = set()
    solution: list[str] = []
    iterations: list[IterationRecord] = []
    index = 0
    while wanted:
        index += 1
        remaining = [q for q in candidates if q.id not in selected_ids]
        held = profile.known | acquired if config.reuse_acquired_objectives else profile.known
        try:
            picked = minimal_cover(wanted, remaining, held, config)
        except NoCover as exc:
            raise Infeasible(index, exc.uncovered) from exc
        picked_sorted = sorted(picked)
        prereq_union = frozenset()
        for lq_id in picked_sorted:
            prereq_union |= by_id[lq_id].prerequisites
            acquired |= by_id[lq_id].objectives
        residual = prereq_union - profile.known
        if config.reuse_acquired_objectives:
            residual -= acquired
        iterations.append(IterationRecord(index, frozenset(picked), len(picked), prereq_union, residual))
        selected_ids |= picked
        solution.extend(picked_sorted)
        wanted = residual
    return SolutionTrace(tuple(iterations), tuple(solution), len(solution))


def global_optimal_plan(
    profile: LearnerProfile,
    dictionary: LQDictionary,
    scope: str | None = None,
    metric: MinimalityMetric = MinimalityMetric.COUNT,
) -> frozenset[str]:
    """The genuinely lightest subset of quanta that reaches the targets.

    Exhaustive subset enumeration, so only usable on small scopes (at
    most ``GLOBAL_SEARCH_BOUND`` quanta). Exists as a comparison point:
    round-by-round resolution minimises each round in isolation, which
    this function does not, and the gap between the two is observable.
    """
    candidates = sorted(dictionary.scoped(scope), key=lambda q: q.id)
    if len(candidates) > GLOBAL_SEARCH_BOUND:
        raise TooLarge(len(candidates), GLOBAL_SEARCH_BOUND)
    wanted = effective_targets(profile)
    if not wanted:
        return frozenset()

    best_key: tuple[int, int, tuple[str, ...]] | None = None
    best: frozenset[str] | None = None
    n = len(candidates)
    for mask in range(1 << n):
        subset = [candidates[i] for i in range(n) if mask >> i & 1]
        pooled = frozenset()
        for q in subset:
            pooled |= q.objectives
        if not wanted <= pooled:
            continue
        if not profile.target <= closure_over(profile.known, subset):
            continue
        key = _selection_key(subset, profile.known, metric)
        if best_key is None or key < best_key:
            best_key = key
            best = frozenset(q.id for q in subset)
    if best is None:
        raise Infeasible(0, profile.target - closure_over(profile.known, candidates))
    return best


def prerequisite_gap(
    profile: LearnerProfile, dictionary: LQDictionary, lq_id: str
) -> GapReport:
    """What stands between this learner and one specific quantum."""
    quantum = dictionary.quantum(lq_id)
    missing = quantum.prerequisites - profile.known
    satisfiable = missing <= closure_over(profile.known, dictionary.quanta)
    return GapReport(lq_id=lq_id, missing=missing, satisfiable=satisfiable)
