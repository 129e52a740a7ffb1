"""Compress families of discovered SE-conditions into short formulas.

A clique is a 2^x-sized family of conditions forming a subcube of the
condition lattice: pick a max condition with non-empty sets U and a free set
D ⊆ U; the family holds one condition per subset between U−D and U, each with
its singletons projected from the max. A clique collapses into a single
conjunction (Sim): common non-empty sets, common empty sets, and |I|<=1 for
the max's singletons. Conditions not covered by any maximal clique are kept
verbatim as residual disjuncts, so the output is always complete.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .isets import ISCondition

MAX_CLIQUE_NIS = 14  # cube recursion memoizes over 3^|nis(max)| splits


@dataclass(frozen=True)
class Clique:
    members: tuple[ISCondition, ...]
    max_member: ISCondition

    def member_keys(self) -> frozenset:
        return frozenset(c.nis for c in self.members)


@dataclass(frozen=True)
class SimplifiedCondition:
    nonempty: tuple[int, ...]
    empty: tuple[int, ...]
    at_most_one: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "nonempty": list(self.nonempty),
            "empty": list(self.empty),
            "at_most_one": list(self.at_most_one),
        }

    @classmethod
    def from_json(cls, obj) -> "SimplifiedCondition":
        return cls(tuple(obj["nonempty"]), tuple(obj["empty"]), tuple(obj["at_most_one"]))

    def format(self) -> str:
        parts = [f"I_{k} ≠ ∅" for k in self.nonempty]
        parts += [f"I_{k} = ∅" for k in self.empty]
        parts += [f"|I_{k}| ≤ 1" for k in self.at_most_one]
        return " ∧ ".join(parts) if parts else "⊤"


@dataclass
class SimplifyResult:
    disjuncts: list[SimplifiedCondition]
    cliques: list[Clique]
    residual: list[ISCondition]

    def to_json(self) -> dict:
        return {
            "disjuncts": [d.to_json() for d in self.disjuncts],
            "residual": [c.to_json() for c in self.residual],
        }


def _name_space(shape) -> frozenset[int]:
    return frozenset(range(1, 1 << (3 * sum(shape))))


def cis(conditions: Iterable[ISCondition], kind: str) -> frozenset[int]:
    """Common non-empty ('nonempty') or common empty ('empty') set names."""
    conds = list(conditions)
    if not conds:
        raise ValueError("cis of an empty condition set")
    shape = conds[0].shape
    if any(c.shape != shape for c in conds):
        raise ValueError("conditions must share a shape")
    if kind == "nonempty":
        out = conds[0].nis
        for c in conds[1:]:
            out &= c.nis
        return frozenset(out)
    if kind == "empty":
        space = _name_space(shape)
        out = space - conds[0].nis
        for c in conds[1:]:
            out &= space - c.nis
        return frozenset(out)
    raise ValueError(f"unknown kind {kind!r}")


def sis_irrelevant_partition(mgic: Iterable[ISCondition]) -> list[list[ISCondition]]:
    """Maximal subsets whose singleton constraints cannot block a clique.

    Two defining predicates: all-sis-empty, or nis ∩ (union of all sis) = sis.
    Returns the deduplicated maximal subsets, largest first.
    """
    conds = list(mgic)
    if not conds:
        return []
    ic_s = set()
    for c in conds:
        ic_s |= c.sis
    s1 = [c for c in conds if not c.sis]
    s2 = [c for c in conds if c.nis & ic_s == c.sis]
    subsets = []
    for s in (s1, s2):
        if s and not any(set(s) == set(t) for t in subsets):
            subsets.append(s)
    subsets.sort(key=lambda s: (-len(s), min(c.sort_key() for c in s)))
    return subsets


def find_max_cliques(subset: Iterable[ISCondition],
                     max_nis: int = MAX_CLIQUE_NIS) -> list[Clique]:
    """All maximal cliques of a SIS-irrelevant condition set."""
    conds = list(subset)
    if not conds:
        return []
    index: dict[frozenset, ISCondition] = {c.nis: c for c in conds}
    # candidate maxes: conditions maximal under nis inclusion
    maxes = [c for c in conds
             if not any(c.nis < d.nis for d in conds)]
    cliques: list[Clique] = []
    for top in maxes:
        if len(top.nis) > max_nis:
            raise ValueError(
                f"clique search over |nis|={len(top.nis)} exceeds cap {max_nis}")
        smax = top.sis
        U = top.nis

        @lru_cache(maxsize=None)
        def cube_ok(low: frozenset, free: frozenset) -> bool:
            if not free:
                c = index.get(low)
                return c is not None and c.sis == low & smax
            d = min(free)
            rest = free - {d}
            return cube_ok(low, rest) and cube_ok(low | {d}, rest)

        # walk down from U collecting minimal valid low corners
        minimal: set[frozenset] = set()
        seen: set[frozenset] = set()
        stack = [U]
        while stack:
            low = stack.pop()
            if low in seen:
                continue
            seen.add(low)
            shrinkable = False
            for e in low:
                cand = low - {e}
                if cube_ok(cand, U - cand):
                    shrinkable = True
                    stack.append(cand)
            if not shrinkable:
                minimal.add(low)
        cube_ok.cache_clear()
        for low in minimal:
            free = sorted(U - low)
            members = []
            for bitsel in range(1 << len(free)):
                key = frozenset(low | {free[j] for j in range(len(free)) if bitsel >> j & 1})
                members.append(index[key])
            members.sort(key=ISCondition.sort_key)
            cliques.append(Clique(members=tuple(members), max_member=top))
    # keep member-set-maximal cliques only, deduplicated
    out: list[Clique] = []
    keys = [c.member_keys() for c in cliques]
    for i, c in enumerate(cliques):
        ki = keys[i]
        if any(ki < kj for kj in keys):
            continue
        if any(ki == o.member_keys() for o in out):
            continue
        out.append(c)
    out.sort(key=lambda c: (-len(c.members), c.max_member.sort_key()))
    return out


def sim(clique: Clique) -> SimplifiedCondition:
    members = list(clique.members)
    shape = clique.max_member.shape
    common_n = cis(members, "nonempty")
    common_e = cis(members, "empty")
    return SimplifiedCondition(
        nonempty=tuple(sorted(common_n)),
        empty=tuple(sorted(common_e)),
        at_most_one=tuple(sorted(clique.max_member.sis)),
    )


def condition_as_sim(c: ISCondition) -> SimplifiedCondition:
    """A lone condition rendered in the same conjunctive vocabulary."""
    space = _name_space(c.shape)
    return SimplifiedCondition(
        nonempty=tuple(sorted(c.nis)),
        empty=tuple(sorted(space - c.nis)),
        at_most_one=tuple(sorted(c.sis)),
    )


def simplify(mgic: Iterable[ISCondition],
             max_nis: int = MAX_CLIQUE_NIS) -> SimplifyResult:
    conds = list(mgic)
    if not conds:
        return SimplifyResult(disjuncts=[], cliques=[], residual=[])
    cliques: list[Clique] = []
    for subset in sis_irrelevant_partition(conds):
        cliques.extend(find_max_cliques(subset, max_nis=max_nis))
    # global maximality across partition subsets + dedup
    out: list[Clique] = []
    keys = [c.member_keys() for c in cliques]
    for i, c in enumerate(cliques):
        ki = keys[i]
        if any(ki < kj for kj in keys):
            continue
        if any(ki == o.member_keys() for o in out):
            continue
        out.append(c)
    out.sort(key=lambda c: (-len(c.members), c.max_member.sort_key()))
    covered: set = set()
    for c in out:
        covered |= {m.nis for m in c.members}
    residual = sorted((c for c in conds if c.nis not in covered), key=ISCondition.sort_key)
    disjuncts = [sim(c) for c in out] + [condition_as_sim(c) for c in residual]
    return SimplifyResult(disjuncts=disjuncts, cliques=out, residual=residual)


# --- semantic checks over size assignments ---------------------------------
# an assignment gives each set name a size class: 0 (empty), 1 (singleton),
# or 2 (two or more atoms)

def condition_holds(c: ISCondition, sizes: dict[int, int]) -> bool:
    for k, v in sizes.items():
        if k in c.sis:
            if v != 1:
                return False
        elif k in c.nis:
            if v == 0:
                return False
        else:
            if v != 0:
                return False
    return all(sizes.get(k, 0) >= 1 for k in c.nis)


def sim_holds(s: SimplifiedCondition, sizes: dict[int, int]) -> bool:
    return (
        all(sizes.get(k, 0) >= 1 for k in s.nonempty)
        and all(sizes.get(k, 0) == 0 for k in s.empty)
        and all(sizes.get(k, 0) <= 1 for k in s.at_most_one)
    )
