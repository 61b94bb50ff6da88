"""Sparse photon-number states of labelled polarization modes.

A state is stored as a polynomial in creation operators acting on vacuum,
``sum_k c_k prod_m (a_m^dag)^{n_m} |0>``. Distinct monomials are orthogonal
and ``|| prod (a^dag)^n |0> ||^2 = prod n!``, so norms never need sqrt(n!)
and rational/surd coefficients stay exact. Fock amplitudes are available
through :meth:`OpticalState.amplitudes`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .._numeric import Surd, simplify

POLS = ("H", "V")


class OpticsError(Exception):
    pass


class ConfigurationError(OpticsError):
    pass


class TruncationError(OpticsError):
    pass


@dataclass(frozen=True, order=True)
class ModeLabel:
    name: str
    pol: str

    def __post_init__(self):
        if self.pol not in POLS:
            raise ConfigurationError(f"polarization must be H or V, got {self.pol!r}")

    def __str__(self):
        return f"{self.name}{self.pol}"


def label(name: str, pol: str) -> ModeLabel:
    return ModeLabel(name, pol)


# An occupation key is a sorted tuple of (ModeLabel, count) with count > 0.
OccupationKey = tuple


def make_key(counts: Mapping[ModeLabel, int]) -> OccupationKey:
    return tuple(sorted((m, n) for m, n in counts.items() if n > 0))


def key_counts(key: OccupationKey) -> dict:
    return dict(key)


def key_photons(key: OccupationKey) -> int:
    return sum(n for _, n in key)


def key_factorial(key: OccupationKey) -> int:
    out = 1
    for _, n in key:
        out *= math.factorial(n)
    return out


def count_in(key: OccupationKey, name: str) -> int:
    return sum(n for m, n in key if m.name == name)


def _add(d: dict, k, v) -> None:
    cur = d.get(k)
    s = v if cur is None else cur + v
    if _is_zero(s):
        d.pop(k, None)
    else:
        d[k] = s


def _is_zero(x) -> bool:
    if isinstance(x, Surd):
        return x.is_zero()
    return x == 0


def _is_one(x) -> bool:
    if isinstance(x, Surd):
        return x == Surd(1)
    return x == 1


def abs2(c):
    if isinstance(c, Surd):
        return simplify(c.abs2())
    if isinstance(c, complex):
        return abs(c) ** 2
    return c * c


class OpticalState:
    """Immutable sparse state; ``modes`` is the set of mode names in play."""

    __slots__ = ("terms", "modes", "truncation")

    def __init__(self, terms: Mapping[OccupationKey, object], modes: Iterable[str], truncation: int = 4):
        self.terms = {k: v for k, v in terms.items() if not _is_zero(v)}
        self.modes = frozenset(modes)
        self.truncation = truncation
        for k in self.terms:
            n = key_photons(k)
            if n > truncation:
                raise TruncationError(f"term with {n} photons exceeds truncation {truncation}")
            for m, _ in k:
                if m.name not in self.modes:
                    raise ConfigurationError(f"photon in undeclared mode {m.name}")

    # construction helpers
    @classmethod
    def vacuum(cls, modes: Iterable[str] = (), truncation: int = 4) -> "OpticalState":
        return cls({(): Surd(1)}, modes, truncation)

    @classmethod
    def from_monomials(cls, items: Iterable[tuple[object, Iterable[ModeLabel]]], modes: Iterable[str],
                       truncation: int = 4) -> "OpticalState":
        terms: dict = {}
        for coef, labels in items:
            counts: dict = {}
            for m in labels:
                counts[m] = counts.get(m, 0) + 1
            _add(terms, make_key(counts), Surd.lift(coef))
        return cls(terms, modes, truncation)

    # queries
    def norm2(self):
        total = 0
        for k, c in self.terms.items():
            total = total + abs2(c) * key_factorial(k)
        return simplify(total) if isinstance(total, Surd) else total

    def is_empty(self) -> bool:
        return not self.terms

    def amplitudes(self) -> dict:
        """Fock-basis amplitudes as complex numbers."""
        return {k: complex(c) * math.sqrt(key_factorial(k)) for k, c in self.terms.items()}

    def photon_numbers(self) -> set:
        return {key_photons(k) for k in self.terms}

    # transformations
    def scaled(self, factor) -> "OpticalState":
        return OpticalState({k: c * factor for k, c in self.terms.items()}, self.modes, self.truncation)

    def filter(self, pred: Callable[[OccupationKey], bool]) -> "OpticalState":
        return OpticalState({k: c for k, c in self.terms.items() if pred(k)}, self.modes, self.truncation)

    def with_modes(self, modes: Iterable[str]) -> "OpticalState":
        return OpticalState(self.terms, modes, self.truncation)

    def substitute(self, image: Callable[[ModeLabel], list | None], new_modes: Iterable[str]) -> "OpticalState":
        """Replace each creation operator a_m^dag by sum_j c_j a_j^dag."""
        out: dict = {}
        cache: dict = {}
        for key, coef in self.terms.items():
            partial = {(): coef}
            for m, n in key:
                img = cache.get(m)
                if img is None:
                    raw = image(m)
                    if raw is None:
                        raw = [(m, 1)]
                    # unit coefficients skip the (slow) exact multiplication
                    img = cache[m] = [(tgt, None if _is_one(c) else c) for tgt, c in raw]
                for _ in range(n):
                    nxt: dict = {}
                    for pk, pc in partial.items():
                        for tgt, c in img:
                            cnt = dict(pk)
                            cnt[tgt] = cnt.get(tgt, 0) + 1
                            _add(nxt, make_key(cnt), pc if c is None else pc * c)
                    partial = nxt
            for pk, pc in partial.items():
                _add(out, pk, pc)
        return OpticalState(out, new_modes, self.truncation)

    def tensor(self, other: "OpticalState", truncation: int | None = None) -> "OpticalState":
        """Product state; terms above the truncation are dropped (perturbative cut)."""
        trunc = max(self.truncation, other.truncation) if truncation is None else truncation
        if self.modes & other.modes:
            raise ConfigurationError(f"modes declared twice: {sorted(self.modes & other.modes)}")
        out: dict = {}
        for k1, c1 in self.terms.items():
            n1 = key_photons(k1)
            for k2, c2 in other.terms.items():
                if n1 + key_photons(k2) > trunc:
                    continue
                _add(out, make_key({**dict(k1), **dict(k2)}), c1 * c2)
        return OpticalState(out, self.modes | other.modes, trunc)

    def __eq__(self, other):
        if not isinstance(other, OpticalState):
            return NotImplemented
        return self.terms == other.terms and self.modes == other.modes

    def __repr__(self):
        body = " + ".join(f"({c})" + "".join(f"[{m}]^{n}" if n > 1 else f"[{m}]" for m, n in k)
                          for k, c in list(self.terms.items())[:8])
        more = "" if len(self.terms) <= 8 else f" + ... ({len(self.terms)} terms)"
        return f"OpticalState({body or '0'}{more})"


@dataclass(frozen=True)
class Mixture:
    """Weighted pure branches; weights are classical probabilities."""

    branches: tuple

    def __iter__(self):
        return iter(self.branches)

    def total_weight(self):
        return sum(w for w, _ in self.branches)
