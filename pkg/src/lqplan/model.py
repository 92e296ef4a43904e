"""Domain model for learning-path planning.

The unit of study is a learner quantum (LQ): a small piece of course
material that requires some knowledge factors (KFs) and delivers others.
A dictionary bundles the quanta for one subject, optionally grouped into
named clouds. A learner profile states what the learner already knows and
what they want to reach. Everything downstream (cover selection, ordering,
generation) works on the types defined here.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import IO, Iterable, Union

KFSet = frozenset[str]

_TOKEN_RE = re.compile(r"^\S+$")

_TOP_LEVEL_KEYS = frozenset({"subject", "clouds", "quanta"})
_QUANTUM_KEYS = frozenset(
    {"id", "title", "prerequisites", "objectives", "duration_minutes", "cost"}
)
_PROFILE_KEYS = frozenset({"known", "target"})


class LQPlanError(Exception):
    """Base class for every error this package raises on purpose."""


class ParseError(LQPlanError):
    """The input is not syntactically valid JSON (or not decodable text)."""


class SchemaError(LQPlanError):
    """The input parses but violates the dictionary or profile schema."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.reason = message


class UnknownCloud(LQPlanError):
    """A cloud name was requested that the dictionary does not define."""

    def __init__(self, name: str):
        super().__init__(f"unknown cloud: {name}")
        self.name = name


class UnknownLQ(LQPlanError):
    """An LQ id was referenced that the dictionary does not contain."""

    def __init__(self, lq_id: str):
        super().__init__(f"unknown LQ id: {lq_id}")
        self.lq_id = lq_id


class MinimalityMetric(Enum):
    """What a cover should minimise."""

    COUNT = "count"
    DURATION = "duration"
    COST = "cost"

    def weight(self, quantum: "LearnerQuantum") -> int:
        if self is MinimalityMetric.COUNT:
            return 1
        if self is MinimalityMetric.DURATION:
            return quantum.duration_minutes
        return quantum.cost


def kfset(items: Iterable[str]) -> KFSet:
    """Build a knowledge-factor set from any iterable of tokens."""
    return frozenset(items)


@dataclass(frozen=True)
class LearnerQuantum:
    """One unit of study material.

    ``prerequisites`` are the KFs a learner must hold before taking the
    unit; ``objectives`` are the KFs the unit delivers. Durations are in
    minutes, costs in whole currency units; both default to zero, meaning
    "free" under the corresponding metric.
    """

    id: str
    title: str
    prerequisites: KFSet = frozenset()
    objectives: KFSet = frozenset()
    duration_minutes: int = 0
    cost: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "prerequisites", frozenset(self.prerequisites))
        object.__setattr__(self, "objectives", frozenset(self.objectives))


@dataclass(frozen=True)
class LQCloud:
    """A named grouping of LQ ids, used to scope planning queries."""

    name: str
    member_ids: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "member_ids", frozenset(self.member_ids))


@dataclass(frozen=True)
class LQDictionary:
    """All quanta available for one subject, plus optional clouds.

    ``quanta`` keeps file order (and may transiently hold duplicate ids so
    that validation can report them); ``by_id`` is a lookup cache where the
    last occurrence of an id wins.
    """

    subject: str
    quanta: tuple[LearnerQuantum, ...]
    clouds: tuple[LQCloud, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "quanta", tuple(self.quanta))
        object.__setattr__(self, "clouds", tuple(self.clouds))

    @cached_property
    def by_id(self) -> dict[str, LearnerQuantum]:
        return {q.id: q for q in self.quanta}

    def quantum(self, lq_id: str) -> LearnerQuantum:
        try:
            return self.by_id[lq_id]
        except KeyError:
            raise UnknownLQ(lq_id) from None

    def cloud(self, name: str) -> LQCloud:
        for c in self.clouds:
            if c.name == name:
                return c
        raise UnknownCloud(name)

    def scoped(self, scope: str | None = None) -> tuple[LearnerQuantum, ...]:
        """The candidate quanta for a query: all of them, or one cloud's."""
        if scope is None:
            return self.quanta
        members = self.cloud(scope).member_ids
        return tuple(q for q in self.quanta if q.id in members)


@dataclass(frozen=True)
class LearnerProfile:
    """What one learner already knows and what they are aiming for."""

    known: KFSet = frozenset()
    target: KFSet = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "known", frozenset(self.known))
        object.__setattr__(self, "target", frozenset(self.target))


@dataclass(frozen=True)
class Finding:
    """One problem discovered by dictionary validation.

    ``severity`` is "error" or "warning"; ``subject`` names the offending
    LQ or cloud; ``code`` is a stable machine-readable tag.
    """

    severity: str
    code: str
    subject: str
    message: str


def _check_token(findings: list[Finding], code: str, subject: str, value: str, what: str) -> None:
    if not isinstance(value, str) or not _TOKEN_RE.match(value):
        findings.append(
            Finding("error", code, subject, f"{what} {value!r} is not a whitespace-free token")
        )


def validate_dictionary(dictionary: LQDictionary, *, strict: bool = False) -> list[Finding]:
    """Check semantic rules and return findings, worst problems as errors.

    Rules checked, in quanta order then cloud order:
      - ids and KFs are non-empty whitespace-free tokens
      - every LQ has at least one objective
      - durations and costs are non-negative integers
      - an LQ does not list a KF as both prerequisite and objective
        (a warning normally, an error under ``strict``)
      - LQ ids are unique; cloud names are unique
      - every cloud member resolves to a defined LQ

    A dictionary built in code never went through the file parser, so type
    and token checks are repeated here rather than trusted.
    """
    findings: list[Finding] = []
    seen_ids: set[str] = set()
    for q in dictionary.quanta:
        _check_token(findings, "bad-id", q.id if isinstance(q.id, str) else repr(q.id), q.id, "id")
        if q.id in seen_ids:
            findings.append(Finding("error", "duplicate-id", q.id, "LQ id defined more than once"))
        seen_ids.add(q.id)
        for kf in sorted(q.prerequisites | q.objectives):
            _check_token(findings, "bad-kf", q.id, kf, "knowledge factor")
        if not q.objectives:
            findings.append(Finding("error", "empty-objectives", q.id, "objectives must be non-empty"))
        for attr, code in (("duration_minutes", "bad-duration"), ("cost", "bad-cost")):
            value = getattr(q, attr)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                findings.append(
                    Finding("error", code, q.id, f"{attr} must be a non-negative integer, got {value!r}")
                )
        overlap = q.prerequisites & q.objectives
        if overlap:
            severity = "error" if strict else "warning"
            listed = ", ".join(sorted(overlap))
            findings.append(
                Finding(severity, "prereq-objective-overlap", q.id,
                        f"listed as both prerequisite and objective: {listed}")
            )
    seen_clouds: set[str] = set()
    for c in dictionary.clouds:
        _check_token(findings, "bad-cloud-name", c.name, c.name, "cloud name")
        if c.name in seen_clouds:
            findings.append(Finding("error", "duplicate-cloud-name", c.name, "cloud defined more than once"))
        seen_clouds.add(c.name)
        for member in sorted(c.member_ids):
            if member not in dictionary.by_id:
                findings.append(
                    Finding("error", "dangling-cloud-member", c.name, f"member {member!r} is not a defined LQ")
                )
    return findings


Source = Union[bytes, bytearray, str, IO[bytes], IO[str]]


def _decode(source: Source) -> str:
    if isinstance(source, (bytes, bytearray)):
        raw: Union[bytes, str] = bytes(source)
    elif isinstance(source, str):
        raw = source
    elif hasattr(source, "read"):
        raw = source.read()
    else:
        raise TypeError(f"cannot read from {type(source).__name__}")
    if isinstance(raw, (bytes, bytearray)):
        try:
            return bytes(raw).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from exc
    return raw


def _parse_json(source: Source) -> object:
    text = _decode(source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _require_object(doc: object, where: str, allowed: frozenset[str]) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError(where, f"expected an object, got {type(doc).__name__}")
    for key in doc:
        if key not in allowed:
            raise SchemaError(f"{where}.{key}" if where else key, "unknown key")
    return doc


def _require_str(doc: dict, where: str, key: str) -> str:
    if key not in doc:
        raise SchemaError(f"{where}.{key}", "missing required key")
    value = doc[key]
    if not isinstance(value, str):
        raise SchemaError(f"{where}.{key}", f"expected a string, got {type(value).__name__}")
    return value


def _require_token(value: object, where: str) -> str:
    if not isinstance(value, str):
        raise SchemaError(where, f"expected a string, got {type(value).__name__}")
    if not _TOKEN_RE.match(value):
        raise SchemaError(where, f"{value!r} is not a whitespace-free token")
    return value


def _token_list(doc: dict, where: str, key: str) -> frozenset[str]:
    if key not in doc:
        raise SchemaError(f"{where}.{key}", "missing required key")
    value = doc[key]
    if not isinstance(value, list):
        raise SchemaError(f"{where}.{key}", f"expected a list, got {type(value).__name__}")
    return frozenset(_require_token(item, f"{where}.{key}[{i}]") for i, item in enumerate(value))


def _optional_count(doc: dict, where: str, key: str) -> int:
    if key not in doc:
        return 0
    value = doc[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaError(f"{where}.{key}", f"expected an integer, got {type(value).__name__}")
    if value < 0:
        raise SchemaError(f"{where}.{key}", f"must be non-negative, got {value}")
    return value


def parse_dictionary(source: Source) -> LQDictionary:
    """Parse dictionary JSON, checking structure only.

    Shape, types, tokens and unknown keys are enforced here; cross-entity
    rules (duplicate ids, dangling cloud members, ...) are left to
    ``validate_dictionary`` so a validation front end can list them all.
    """
    doc = _require_object(_parse_json(source), "", _TOP_LEVEL_KEYS)
    subject = _require_str(doc, "$", "subject")
    if "quanta" not in doc:
        raise SchemaError("$.quanta", "missing required key")
    raw_quanta = doc["quanta"]
    if not isinstance(raw_quanta, list):
        raise SchemaError("$.quanta", f"expected a list, got {type(raw_quanta).__name__}")
    quanta = []
    for i, item in enumerate(raw_quanta):
        where = f"$.quanta[{i}]"
        entry = _require_object(item, where, _QUANTUM_KEYS)
        quanta.append(
            LearnerQuantum(
                id=_require_token(_require_str(entry, where, "id"), f"{where}.id"),
                title=_require_str(entry, where, "title"),
                prerequisites=_token_list(entry, where, "prerequisites"),
                objectives=_token_list(entry, where, "objectives"),
                duration_minutes=_optional_count(entry, where, "duration_minutes"),
                cost=_optional_count(entry, where, "cost"),
            )
        )
    clouds = []
    raw_clouds = doc.get("clouds", {})
    if not isinstance(raw_clouds, dict):
        raise SchemaError("$.clouds", f"expected an object, got {type(raw_clouds).__name__}")
    for name, members in raw_clouds.items():
        where = f"$.clouds.{name}"
        _require_token(name, where)
        if not isinstance(members, list):
            raise SchemaError(where, f"expected a list, got {type(members).__name__}")
        clouds.append(
            LQCloud(name, frozenset(_require_token(m, f"{where}[{i}]") for i, m in enumerate(members)))
        )
    return LQDictionary(subject=subject, quanta=tuple(quanta), clouds=tuple(clouds))


def load_dictionary(source: Source) -> LQDictionary:
    """Parse and fully validate a dictionary, raising on the first error.

    Warnings (for example prerequisite/objective overlap) do not block
    loading; use ``validate_dictionary`` directly to inspect them.
    """
    dictionary = parse_dictionary(source)
    for finding in validate_dictionary(dictionary):
        if finding.severity == "error":
            raise SchemaError(finding.subject, finding.message)
    return dictionary


def parse_profile(source: Source) -> LearnerProfile:
    """Parse learner-profile JSON with ``known`` and ``target`` KF lists."""
    doc = _require_object(_parse_json(source), "", _PROFILE_KEYS)
    known = _token_list(doc, "$", "known") if "known" in doc else frozenset()
    if "target" not in doc:
        raise SchemaError("$.target", "missing required key")
    return LearnerProfile(known=known, target=_token_list(doc, "$", "target"))


def serialize_dictionary(dictionary: LQDictionary) -> bytes:
    """Render a dictionary as canonical JSON (stable key and list order)."""
    doc: dict = {"subject": dictionary.subject}
    if dictionary.clouds:
        doc["clouds"] = {c.name: sorted(c.member_ids) for c in dictionary.clouds}
    doc["quanta"] = [
        {
            "id": q.id,
            "title": q.title,
            "prerequisites": sorted(q.prerequisites),
            "objectives": sorted(q.objectives),
            "duration_minutes": q.duration_minutes,
            "cost": q.cost,
        }
        for q in dictionary.quanta
    ]
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def serialize_profile(profile: LearnerProfile) -> bytes:
    doc = {"known": sorted(profile.known), "target": sorted(profile.target)}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def closure_over(known: Iterable[str], quanta: Iterable[LearnerQuantum]) -> KFSet:
    """Every KF reachable from ``known`` by repeatedly taking ready quanta.

    A quantum is ready once all its prerequisites are held; taking it adds
    its objectives. This is a least fixpoint, computed with a worklist:
    each quantum tracks how many prerequisites it still misses and fires
    exactly once, when the count hits zero.
    """
    quanta = list(quanta)
    held: set[str] = set(known)
    missing: list[int] = []
    waiting_on: dict[str, list[int]] = {}
    ready: list[int] = []
    for idx, q in enumerate(quanta):
        unmet = q.prerequisites - held
        missing.append(len(unmet))
        if not unmet:
            ready.append(idx)
        for kf in unmet:
            waiting_on.setdefault(kf, []).append(idx)
    while ready:
        idx = ready.pop()
        for kf in quanta[idx].objectives:
            if kf in held:
                continue
            held.add(kf)
            for waiter in waiting_on.get(kf, ()):
                missing[waiter] -= 1
                if missing[waiter] == 0:
                    ready.append(waiter)
    return frozenset(held)


def kf_closure(known: Iterable[str], dictionary: LQDictionary, scope: str | None = None) -> KFSet:
    """Closure of ``known`` under the dictionary (or one cloud of it)."""
    return closure_over(known, dictionary.scoped(scope))


def effective_targets(profile: LearnerProfile) -> KFSet:
    """The target KFs the learner does not already hold."""
    return profile.target - profile.known
