"""Fusion rings, permutations and fusion of untwisted tuples with twisted labels.

For sigma in S_k with canonical cycles c_1..c_s, the sigma-twisted label
T_sigma(N_1,...,N_s) attaches N_i to c_i.  Fusing with M_1 (x) ... (x) M_k
fuses, for every cycle, the M-labels at the cycle's positions with its N-label.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from itertools import permutations as _perms, product
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union


class RingError(ValueError):
    """A fusion-ring file is malformed or violates a ring axiom."""


class LabelError(ValueError):
    """An unknown label or an inconsistent orbifold label."""


# ---------------------------------------------------------------------------
# fusion rings
# ---------------------------------------------------------------------------

@dataclass
class FusionRing:
    name: str
    labels: Tuple[str, ...]
    unit: str
    dual: Dict[str, str]
    N: Dict[Tuple[str, str], Counter]
    aliases: Dict[str, str] = field(default_factory=dict)
    _products: Dict[Tuple[str, ...], Tuple[Tuple[str, int], ...]] = field(
        default_factory=dict, init=False, repr=False, compare=False)

    @classmethod
    def from_dict(cls, data: dict, validate: bool = True) -> "FusionRing":
        try:
            labels = tuple(data["labels"])
            unit = data["unit"]
            dual = dict(data["dual"])
            entries = data["N"]
            name = data.get("name", "ring")
        except (KeyError, TypeError) as exc:
            raise RingError(f"missing or malformed field: {exc}") from None
        if len(set(labels)) != len(labels):
            raise RingError("repeated label")
        known = set(labels)
        if unit not in known:
            raise RingError(f"unit {unit!r} is not a label")
        N: Dict[Tuple[str, str], Counter] = {(a, b): Counter() for a in labels for b in labels}
        for row in entries:
            if len(row) != 4:
                raise RingError(f"entry {row!r} must be [a, b, c, multiplicity]")
            a, b, c, n = row
            for x in (a, b, c):
                if x not in known:
                    raise RingError(f"unknown label {x!r} in entry {row!r}")
            if not isinstance(n, int) or n < 0:
                raise RingError(f"multiplicity in {row!r} must be a nonnegative integer")
            if n:
                N[(a, b)][c] = n
        ring = cls(name, labels, unit, dual, N, dict(data.get("aliases", {})))
        if validate:
            ring.validate()
        return ring

    @classmethod
    def load(cls, path: Union[str, Path]) -> "FusionRing":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise RingError(f"cannot read ring file {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise RingError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        rows = [[a, b, c, n] for (a, b), cnt in self.N.items() for c, n in sorted(cnt.items())]
        out = {"name": self.name, "labels": list(self.labels), "unit": self.unit,
               "dual": dict(self.dual), "N": rows}
        if self.aliases:
            out["aliases"] = dict(self.aliases)
        return out

    # axioms -------------------------------------------------------------
    def validate(self) -> None:
        """Check unit, duality, commutativity and associativity; raise on the first failure."""
        L, one = self.labels, self.unit
        for a in L:
            if self.N[(one, a)] != Counter({a: 1}):
                raise RingError(f"unit law fails: N_(1,{a}) = {dict(self.N[(one, a)])}")
        for a in L:
            if self.dual.get(a) not in L:
                raise RingError(f"dual of {a!r} missing or unknown")
            if self.dual[self.dual[a]] != a:
                raise RingError(f"dual is not an involution at {a!r}")
            if self.N[(a, self.dual[a])][one] != 1:
                raise RingError(f"N_({a},{self.dual[a]})^{one} must be 1")
        for a in L:
            for b in L:
                if self.N[(a, b)] != self.N[(b, a)]:
                    raise RingError(f"commutativity fails for ({a}, {b})")
        for a in L:
            for b in L:
                for c in L:
                    for d in L:
                        left = sum(self.N[(a, b)][e] * self.N[(e, c)][d] for e in L)
                        right = sum(self.N[(b, c)][f] * self.N[(a, f)][d] for f in L)
                        if left != right:
                            raise RingError(
                                f"associativity fails for (a,b,c,d) = ({a}, {b}, {c}, {d}): {left} != {right}")

    # queries ------------------------------------------------------------
    def resolve(self, label: str) -> str:
        lab = label.strip()
        if lab in self.labels:
            return lab
        if lab in self.aliases:
            return self.aliases[lab]
        raise LabelError(f"unknown label {label!r} for ring {self.name}")

    def fuse(self, a: str, b: str) -> Counter:
        a, b = self.resolve(a), self.resolve(b)
        return Counter(self.N[(a, b)])

    def fuse_many(self, labels: Iterable[str]) -> Counter:
        """Left-iterated fusion of a sequence of labels (the unit for an empty sequence)."""
        return Counter(dict(self.product_items(labels)))

    def product_items(self, labels: Iterable[str]) -> Tuple[Tuple[str, int], ...]:
        """fuse_many as sorted (label, multiplicity) pairs, memoized per label sequence."""
        key = tuple(self.resolve(lab) for lab in labels)
        hit = self._products.get(key)
        if hit is None:
            out = {self.unit: 1}
            for lab in key:
                nxt: Dict[str, int] = {}
                for c, n in out.items():
                    for d, m in self.N[(c, lab)].items():
                        nxt[d] = nxt.get(d, 0) + n * m
                out = nxt
            hit = tuple(sorted((c, n) for c, n in out.items() if n))
            self._products[key] = hit
        return hit


def shipped_rings() -> List[str]:
    return sorted(p.name[:-5] for p in resources.files("orbifusion").joinpath("rings").iterdir()
                  if p.name.endswith(".json"))


def load_ring(name_or_path: str) -> FusionRing:
    """Load a shipped ring by name (e.g. "Ising") or a ring file by path."""
    candidate = resources.files("orbifusion").joinpath("rings").joinpath(f"{name_or_path}.json")
    if candidate.is_file():
        return FusionRing.from_dict(json.loads(candidate.read_text(encoding="utf-8")))
    return FusionRing.load(name_or_path)


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..k} stored by its images."""

    images: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise LabelError(f"{self.images} is not a permutation")

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], k: int) -> "Permutation":
        img = list(range(1, k + 1))
        seen = set()
        for cyc in cycles:
            for i, p in enumerate(cyc):
                if not 1 <= p <= k:
                    raise LabelError(f"point {p} outside 1..{k}")
                if p in seen:
                    raise LabelError(f"point {p} repeated")
                seen.add(p)
                img[p - 1] = cyc[(i + 1) % len(cyc)]
        return cls(tuple(img))

    @classmethod
    def parse(cls, text: str, k: int) -> "Permutation":
        """Parse cycle notation such as "(1 2 3)(4 5)"; unmentioned points are fixed."""
        s = text.strip()
        if s in ("", "()", "id", "e"):
            return cls.identity(k)
        pos = 0
        cycles = []
        for m in re.finditer(r"\s*\(([^()]*)\)\s*", s):
            if m.start() != pos:
                raise LabelError(f"cannot parse permutation at position {pos + 1}: {s[pos:]!r}")
            body = m.group(1).replace(",", " ").split()
            try:
                cycles.append([int(x) for x in body])
            except ValueError:
                raise LabelError(f"non-integer point in cycle {m.group(0).strip()!r} at position {m.start(1) + 1}") from None
            pos = m.end()
        if pos != len(s):
            raise LabelError(f"cannot parse permutation at position {pos + 1}: {s[pos:]!r}")
        return cls.from_cycles(cycles, k)

    @property
    def k(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """(self * other)(i) = self(other(i))."""
        return Permutation(tuple(self(other(i)) for i in range(1, self.k + 1)))

    @lru_cache(maxsize=None)
    def inverse(self) -> "Permutation":
        inv = [0] * self.k
        for i, p in enumerate(self.images):
            inv[p - 1] = i + 1
        return Permutation(tuple(inv))

    @lru_cache(maxsize=None)
    def conjugate_by(self, mu: "Permutation") -> "Permutation":
        """mu^{-1} self mu."""
        return mu.inverse() * self * mu

    @cached_property
    def cycles(self) -> Tuple[Tuple[int, ...], ...]:
        """Canonical cycles: longest first, ties by smallest element; each starts at its minimum."""
        seen = set()
        out = []
        for start in range(1, self.k + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self(start)
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self(nxt)
            out.append(tuple(cyc))
        out.sort(key=lambda c: (-len(c), c[0]))
        return tuple(out)

    def cycle_type(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.cycles)

    def cycle_of(self, i: int) -> int:
        for n, c in enumerate(self.cycles):
            if i in c:
                return n
        raise LabelError(f"point {i} outside 1..{self.k}")

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.k + 1))

    def __str__(self):
        nontrivial = [c for c in self.cycles if len(c) > 1]
        if not nontrivial:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in nontrivial)


def all_permutations(k: int) -> List[Permutation]:
    return [Permutation(p) for p in _perms(range(1, k + 1))]


def sigma_kappa(kappa: Sequence[int]) -> Permutation:
    """The block permutation (1..k_1)(k_1+1..k_1+k_2)... for a partition kappa."""
    cycles, start = [], 1
    for part in kappa:
        cycles.append(list(range(start, start + part)))
        start += part
    return Permutation.from_cycles(cycles, start - 1)


def cycle_normal_form(sigma: Permutation) -> Tuple[Tuple[int, ...], Permutation]:
    """(kappa, mu) with mu sigma mu^{-1} = sigma_kappa; mu sends the i-th canonical
    cycle onto the i-th block, smallest element first."""
    kappa = sigma.cycle_type()
    img = [0] * sigma.k
    pos = 1
    for cyc in sigma.cycles:
        for p in cyc:
            img[p - 1] = pos
            pos += 1
    return kappa, Permutation(tuple(img))


# ---------------------------------------------------------------------------
# orbifold labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Untwisted:
    """M_1 (x) ... (x) M_k."""

    labels: Tuple[str, ...]

    def __str__(self):
        return "(" + ", ".join(self.labels) + ")"


@dataclass(frozen=True)
class Twisted:
    """T_sigma(N_1,...,N_s); N_i belongs to the i-th canonical cycle of sigma."""

    sigma: Permutation
    labels: Tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.sigma.cycles):
            raise LabelError(f"twisted label needs {len(self.sigma.cycles)} entries, got {len(self.labels)}")

    def label_at(self, point: int) -> str:
        return self.labels[self.sigma.cycle_of(point)]

    def __str__(self):
        return f"T{self.sigma}(" + ", ".join(self.labels) + ")"


def _twisted_from_points(sigma: Permutation, per_point: Dict[int, str]) -> Twisted:
    return Twisted(sigma, tuple(per_point[c[0]] for c in sigma.cycles))


def conjugate_label(label, mu: Permutation):
    """The label of W^mu: slots are read through mu; a tau-twisted label becomes
    mu^{-1} tau mu-twisted, with the cycle mu^{-1}(c) carrying the label of c."""
    if isinstance(label, Untwisted):
        if len(label.labels) != mu.k:
            raise LabelError("permutation size does not match the tuple")
        return Untwisted(tuple(label.labels[mu(i) - 1] for i in range(1, mu.k + 1)))
    sigma = label.sigma.conjugate_by(mu)
    per_point = {i: label.label_at(mu(i)) for i in range(1, mu.k + 1)}
    return _twisted_from_points(sigma, per_point)


def _check(ring: FusionRing, M: Sequence[str], T: Twisted) -> Tuple[Tuple[str, ...], Twisted]:
    if len(M) != T.sigma.k:
        raise LabelError(f"expected {T.sigma.k} untwisted labels, got {len(M)}")
    M = tuple(ring.resolve(m) for m in M)
    T = Twisted(T.sigma, tuple(ring.resolve(n) for n in T.labels))
    return M, T


def orbifold_fuse(ring: FusionRing, M: Sequence[str], T: Twisted) -> Counter:
    """(M_1 (x) ... (x) M_k) fused with T_sigma(N_1..N_s), as a multiset of Twisted labels."""
    M, T = _check(ring, M, T)
    per_cycle = []
    for cyc, N in zip(T.sigma.cycles, T.labels):
        per_cycle.append(ring.product_items([M[p - 1] for p in cyc] + [N]))
    out: Counter = Counter()
    for combo in product(*per_cycle):
        mult = 1
        for _, n in combo:
            mult *= n
        out[Twisted(T.sigma, tuple(lab for lab, _ in combo))] += mult
    return out


def single_slot_fuse(ring: FusionRing, position: int, M: str, T: Twisted) -> Counter:
    """(1 (x) ... M at ``position`` ... (x) 1) fused with T: only the cycle through
    ``position`` changes."""
    idx = T.sigma.cycle_of(position)
    out: Counter = Counter()
    for lab, n in ring.fuse(T.labels[idx], M).items():
        labels = list(T.labels)
        labels[idx] = lab
        out[Twisted(T.sigma, tuple(labels))] += n
    return out


def iterated_fuse(ring: FusionRing, M: Sequence[str], T: Twisted) -> Counter:
    """Fuse one slot at a time, (M_1 (x) 1 ...) then (1 (x) M_2 ...) and so on."""
    M, T = _check(ring, M, T)
    current: Counter = Counter({T: 1})
    for pos, m in enumerate(M, start=1):
        if m == ring.unit:
            continue
        nxt: Counter = Counter()
        for lab, n in current.items():
            for res, r in single_slot_fuse(ring, pos, m, lab).items():
                nxt[res] += n * r
        current = nxt
    return +current


def classify_twisted(ring: FusionRing, sigma: Permutation) -> List[Twisted]:
    """All irreducible sigma-twisted labels: one ring label per cycle."""
    s = len(sigma.cycles)
    return [Twisted(sigma, combo) for combo in product(ring.labels, repeat=s)]


def all_untwisted(ring: FusionRing, k: int) -> List[Tuple[str, ...]]:
    return list(product(ring.labels, repeat=k))


def conjugate_multiset(ms: Counter, mu: Permutation) -> Counter:
    out: Counter = Counter()
    for lab, n in ms.items():
        out[conjugate_label(lab, mu)] += n
    return out


def equivariance_holds(ring: FusionRing, M: Sequence[str], T: Twisted, mu: Permutation) -> bool:
    """M fused with T^mu equals (M^{mu^{-1}} fused with T)^mu."""
    left = orbifold_fuse(ring, M, conjugate_label(T, mu))
    Minv = conjugate_label(Untwisted(tuple(M)), mu.inverse()).labels
    right = conjugate_multiset(orbifold_fuse(ring, Minv, T), mu)
    return left == right


def format_multiset(ms: Counter) -> str:
    if not ms:
        return "0"
    parts = []
    for lab, n in sorted(ms.items(), key=lambda kv: (kv[0].sigma.images, kv[0].labels)):
        parts.append(str(lab) if n == 1 else f"{n}*{lab}")
    return " + ".join(parts)
