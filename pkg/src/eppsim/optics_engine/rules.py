"""Detection-pattern predicates over occupation keys.

Rules only look at photon counts per mode name (polarization summed), which
is what non-polarization-resolving, photon-number-resolving detectors see.
"""

from __future__ import annotations

from dataclasses import dataclass

from .state import OccupationKey, count_in


class PostselectionRule:
    def matches(self, key: OccupationKey) -> bool:  # pragma: no cover - interface
        raise NotImplementedError

    def __call__(self, key):
        return self.matches(key)

    def to_dict(self) -> dict:  # pragma: no cover - interface
        raise NotImplementedError

    @staticmethod
    def from_dict(d: dict) -> "PostselectionRule":
        kind = d["kind"]
        if kind == "pattern":
            return Pattern(d["counts"], bool(d.get("only", True)))
        if kind == "any":
            return AnyOf(tuple(PostselectionRule.from_dict(x) for x in d["rules"]))
        if kind == "not":
            return Not(PostselectionRule.from_dict(d["rule"]))
        if kind == "all":
            return Everything()
        raise ValueError(f"unknown rule kind {kind!r}")


@dataclass(frozen=True)
class Pattern(PostselectionRule):
    """Exact photon counts on the listed modes; with ``only`` every other mode is empty."""

    counts: dict
    only: bool = True

    def __hash__(self):
        return hash((tuple(sorted(self.counts.items())), self.only))

    def matches(self, key):
        for name, n in self.counts.items():
            if count_in(key, name) != n:
                return False
        if self.only:
            listed = set(self.counts)
            return all(m.name in listed for m, _ in key)
        return True

    def to_dict(self):
        return {"kind": "pattern", "counts": dict(self.counts), "only": self.only}


@dataclass(frozen=True)
class AnyOf(PostselectionRule):
    rules: tuple

    def matches(self, key):
        return any(r.matches(key) for r in self.rules)

    def to_dict(self):
        return {"kind": "any", "rules": [r.to_dict() for r in self.rules]}


@dataclass(frozen=True)
class Not(PostselectionRule):
    rule: PostselectionRule

    def matches(self, key):
        return not self.rule.matches(key)

    def to_dict(self):
        return {"kind": "not", "rule": self.rule.to_dict()}


@dataclass(frozen=True)
class Everything(PostselectionRule):
    def matches(self, key):
        return True

    def to_dict(self):
        return {"kind": "all"}


def one_each(modes, only: bool = True) -> Pattern:
    """The "four mode" style rule: exactly one photon in every listed mode."""
    return Pattern({m: 1 for m in modes}, only)


def nothing() -> PostselectionRule:
    return Not(Everything())
