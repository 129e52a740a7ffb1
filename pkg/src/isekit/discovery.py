"""Search for k-m-n SE-conditions.

A k-m-n problem asks which conditions on the independent sets of a tuple
T = <K, M, N> (k, m, n rules) force K∪M and K∪N to be equivalent for every
instantiation. Conditions are explored layer by layer (layer i = conditions
with i non-empty sets), each candidate is verified on its canonical tuple,
failures are kept as minimal non-SE-conditions and prune deeper layers.

Three entry points:
  discover_basic        plain subset enumeration (tiny shapes)
  discover_improved     filtered name universe, layered pruned search, sound
  discover_conjectural  verifies only the first k+m+n layers, classifies the
                        rest by the observed minimality/singleton regularities
"""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .program import Program, popcount
from .semantics import Semantics, equivalent, DEFAULT_POW3_CAP
from .isets import ISCondition, canonical_tuple, locals_from_name, make_condition
from .transforms import TransformKind, apply_transform


class SearchSpaceError(RuntimeError):
    pass


class CheckpointError(RuntimeError):
    pass


@dataclass
class RunConfig:
    jobs: int = 1
    max_layer: Optional[int] = None
    pow3_cap: int = DEFAULT_POW3_CAP
    drop_i5: Optional[bool] = None   # default: drop when k+m+n > 2
    mode: str = "sound"
    out_path: Optional[str] = None
    checkpoint_path: Optional[str] = None
    restrict: bool = False           # basic search over the filtered universe

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if self.pow3_cap < 1:
            raise ValueError("caps must be positive")


@dataclass
class SearchReport:
    shape: tuple[int, int, int]
    mgic: list[ISCondition]
    mnse: list[ISCondition]
    tr: int
    max_nse: int
    stats: dict
    mode: str = "sound"

    def to_json(self) -> dict:
        return {
            "shape": list(self.shape),
            "mgic": [c.to_json() for c in self.mgic],
            "mnse": [c.to_json() for c in self.mnse],
            "tr": self.tr,
            "max_nse": self.max_nse,
            "stats": self.stats,
            "mode": self.mode,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, obj: dict) -> "SearchReport":
        return cls(
            shape=tuple(obj["shape"]),
            mgic=[ISCondition.from_json(c) for c in obj["mgic"]],
            mnse=[ISCondition.from_json(c) for c in obj["mnse"]],
            tr=obj["tr"],
            max_nse=obj["max_nse"],
            stats=obj["stats"],
            mode=obj.get("mode", "sound"),
        )

    def same_findings(self, other: "SearchReport") -> bool:
        """Equality of the search results proper (mode/stats may differ)."""
        return (
            self.shape == other.shape
            and sorted(self.mgic, key=ISCondition.sort_key) == sorted(other.mgic, key=ISCondition.sort_key)
            and sorted(self.mnse, key=ISCondition.sort_key) == sorted(other.mnse, key=ISCondition.sort_key)
            and self.tr == other.tr
            and self.max_nse == other.max_nse
        )

    def summary_line(self) -> str:
        k, m, n = self.shape
        s = self.stats
        parts = [f"{k}-{m}-{n}:", f"|IS|={s.get('is')}"]
        if s.get("is_prime") is not None:
            parts.append(f"|IS'|={s['is_prime']}")
        if s.get("is_dprime") is not None:
            parts.append(f"|IS''|={s['is_dprime']}")
        parts += [
            f"|MGIC|={len(self.mgic)}",
            f"|MNSE|={len(self.mnse)}",
            f"TR={self.tr}",
            f"Max={self.max_nse}",
            f"[{self.mode}]",
        ]
        return " ".join(parts)


def is_semi_valid(r) -> bool:
    """Single rule equivalent to nothing: overlap/tautology present or head gone."""
    h, b, c = r.head, r.pbody, r.nbody
    return bool((b & c) & ~h) or not (h & ~(b | c)) or bool((h & b) & ~c) or bool(h & b & c)


def full_name_universe(shape) -> list[int]:
    n = sum(shape)
    return list(range(1, 1 << (3 * n)))


def base_name_universe(shape, drop_i5: Optional[bool] = None) -> list[int]:
    """Names with no 3/6/7 local digit (and no 5 for the larger shapes)."""
    n = sum(shape)
    if drop_i5 is None:
        drop_i5 = n > 2
    banned = {3, 6, 7} | ({5} if drop_i5 else set())
    out = []
    for v in range(1, 1 << (3 * n)):
        if not any(d in banned for d in locals_from_name(v, n)):
            out.append(v)
    return out


def sic2_excluded(c: ISCondition) -> bool:
    """True iff some rule position has no non-empty name with local digit 4."""
    n = c.n_rules
    covered = 0
    for v in c.nis:
        for k, d in enumerate(locals_from_name(v, n)):
            if d == 4:
                covered |= 1 << k
    return covered != (1 << n) - 1


def split_tuple(T, shape) -> tuple[Program, Program]:
    """K∪M and K∪N programs of a <K, M, N> tuple."""
    K, M, N = T.programs
    km = Program(rules=K.rules + M.rules, universe=T.universe)
    kn = Program(rules=K.rules + N.rules, universe=T.universe)
    return km, kn


def verify_and_compute_mgse(shape, IS_n, IS_s, sem: Semantics = Semantics.LPMLN,
                            cap: int = DEFAULT_POW3_CAP) -> Optional[ISCondition]:
    """Verify the condition on its canonical tuple; generalize the singletons.

    Returns None if the tuple pair is inequivalent. Otherwise keeps a name in
    sis only if growing that set with a fresh atom breaks the equivalence.
    """
    IS_n = frozenset(IS_n)
    IS_s = frozenset(IS_s)
    if not IS_s <= IS_n:
        raise ValueError("IS_s must be a subset of IS_n")
    cond = ISCondition(shape=tuple(shape), nis=IS_n, sis=IS_s)
    T = canonical_tuple(cond)
    km, kn = split_tuple(T, shape)
    ok, _ = equivalent(km, kn, sem, cap=cap)
    if not ok:
        return None
    retained = []
    for s in sorted(IS_s):
        T2 = apply_transform(T, TransformKind.S_EX, s, fresh="y")
        km2, kn2 = split_tuple(T2, shape)
        ok2, _ = equivalent(km2, kn2, sem, cap=cap)
        if not ok2:
            retained.append(s)
    return ISCondition(shape=tuple(shape), nis=IS_n, sis=frozenset(retained))


_verify_cache: dict = {}


def _verify_cached(shape, nis, sis, cap):
    key = (tuple(shape), nis, sis)
    if key not in _verify_cache:
        _verify_cache[key] = verify_and_compute_mgse(shape, nis, sis, cap=cap)
    return _verify_cache[key]


def _worker_verify(args):
    shape, nis, cap = args
    names = frozenset(nis)
    return nis, _verify_cached(shape, names, names, cap)


def mnse_insert_minimal(mnse: list[ISCondition], c: ISCondition) -> list[ISCondition]:
    """Keep the antichain of minimal failures under strict nis-inclusion."""
    for e in mnse:
        if e.nis <= c.nis:
            return mnse
    return [e for e in mnse if not c.nis < e.nis] + [c]


def _sorted_conditions(conds):
    return sorted(conds, key=ISCondition.sort_key)


def discover_basic(shape, config: Optional[RunConfig] = None) -> SearchReport:
    """Enumerate every subset of the name universe as a singleton condition."""
    config = config or RunConfig()
    shape = tuple(shape)
    names = base_name_universe(shape, config.drop_i5) if config.restrict else full_name_universe(shape)
    if len(names) > 16:
        raise SearchSpaceError(f"basic search over {len(names)} names is not tractable")
    mgic: list[ISCondition] = []
    mnse: list[ISCondition] = []
    verified = 0
    for size in range(0, len(names) + 1):
        for combo in combinations(names, size):
            verified += 1
            res = verify_and_compute_mgse(shape, combo, combo, cap=config.pow3_cap)
            if res is not None:
                mgic.append(res)
            else:
                mnse = mnse_insert_minimal(mnse, make_condition(shape, combo))
    stats = {
        "is": (1 << (3 * sum(shape))) - 1,
        "is_prime": len(names) if config.restrict else None,
        "is_dprime": None,
        "verified": verified,
    }
    return SearchReport(
        shape=shape,
        mgic=_sorted_conditions(mgic),
        mnse=_sorted_conditions(mnse),
        tr=len(names),
        max_nse=max((len(c.sis) for c in mnse), default=0),
        stats=stats,
        mode="sound",
    )


def _layer_candidates(names: list[int], i: int, n_rules: int,
                      mnse_sets: list[frozenset]) -> list[tuple[int, ...]]:
    """Size-i subsets of names that cover every rule with a digit-4 name and
    contain no recorded minimal failure; DFS with subtree pruning.

    Names that contribute coverage are explored first, so any branch that
    wanders into coverage-free names before covering every rule is cut by the
    suffix check instead of being enumerated to the leaves.
    """
    full = (1 << n_rules) - 1

    def cover_of(v):
        c = 0
        for k, d in enumerate(locals_from_name(v, n_rules)):
            if d == 4:
                c |= 1 << k
        return c

    names = sorted(names, key=lambda v: (cover_of(v) == 0, v))
    index = {v: idx for idx, v in enumerate(names)}
    masks = []
    for e in mnse_sets:
        if all(v in index for v in e):
            masks.append(sum(1 << index[v] for v in e))
    cover = [cover_of(v) for v in names]
    suffix = [0] * (len(names) + 1)
    for idx in range(len(names) - 1, -1, -1):
        suffix[idx] = suffix[idx + 1] | cover[idx]
    masks_with = [[m for m in masks if m >> idx & 1] for idx in range(len(names))]
    out: list[tuple[int, ...]] = []
    chosen: list[int] = []

    def dfs(start: int, idx_mask: int, covered: int, slots: int):
        if slots == 0:
            if covered == full:
                out.append(tuple(sorted(chosen)))
            return
        for idx in range(start, len(names) - slots + 1):
            if covered | suffix[idx] != full:
                break  # later names cover even less
            nmask = idx_mask | (1 << idx)
            if any(m & ~nmask == 0 for m in masks_with[idx]):
                continue  # contains a known minimal failure
            chosen.append(names[idx])
            dfs(idx + 1, nmask, covered | cover[idx], slots - 1)
            chosen.pop()

    dfs(0, 0, 0, i)
    out.sort()
    return out


def _config_hash(shape, config: RunConfig) -> str:
    payload = json.dumps(
        {
            "shape": list(shape),
            "mode": config.mode,
            "drop_i5": config.drop_i5,
            "max_layer": config.max_layer,
            "restrict": config.restrict,
        },
        sort_keys=True,
    )
    return hashlib.sha1(payload.encode()).hexdigest()[:16]


class _Checkpoint:
    """Append-only JSON-lines log of completed layers, validated on resume."""

    def __init__(self, path: Optional[str], shape, config: RunConfig):
        self.path = path
        self.hash = _config_hash(shape, config)
        self.shape = list(shape)
        self.base = None
        self.layers: list[dict] = []
        if path and os.path.exists(path):
            self._load()

    def _load(self):
        with open(self.path) as f:
            lines = [json.loads(s) for s in f if s.strip()]
        if not lines:
            return
        head = lines[0]
        if head.get("kind") != "header" or head.get("shape") != self.shape \
                or head.get("config") != self.hash:
            raise CheckpointError(f"checkpoint {self.path} does not match this run")
        for rec in lines[1:]:
            if rec["kind"] == "base":
                self.base = rec
            elif rec["kind"] == "layer":
                self.layers.append(rec)

    def _append(self, rec: dict):
        if not self.path:
            return
        new = not os.path.exists(self.path) or os.path.getsize(self.path) == 0
        with open(self.path, "a") as f:
            if new:
                f.write(json.dumps({"kind": "header", "shape": self.shape,
                                    "config": self.hash}) + "\n")
            f.write(json.dumps(rec) + "\n")

    def record_base(self, is2, mnse, verified):
        if self.base is None:
            rec = {"kind": "base", "is2": list(is2),
                   "mnse": [c.to_json() for c in mnse], "verified": verified}
            self._append(rec)
            self.base = rec

    def record_layer(self, i, layer_mgic, layer_fail, verified):
        rec = {"kind": "layer", "i": i,
               "mgic": [c.to_json() for c in layer_mgic],
               "mnse_add": [c.to_json() for c in layer_fail],
               "verified": verified}
        self._append(rec)
        self.layers.append(rec)


def _discover_layered(shape, config: RunConfig, conjectural: bool) -> SearchReport:
    shape = tuple(shape)
    total = sum(shape)
    if total <= 1:
        # the filtered search space is degenerate for single-rule problems
        rep = discover_basic(shape, RunConfig(pow3_cap=config.pow3_cap))
        rep.mode = "conjectural" if conjectural else "sound"
        return rep

    is_all = (1 << (3 * total)) - 1
    is_prime = base_name_universe(shape, config.drop_i5)
    ckpt = _Checkpoint(config.checkpoint_path, shape, config)

    verified = 0
    mnse: list[ISCondition] = []
    if ckpt.base is not None:
        is2 = list(ckpt.base["is2"])
        mnse = [ISCondition.from_json(c) for c in ckpt.base["mnse"]]
        verified += ckpt.base.get("verified", 0)
    else:
        is2 = []
        for x in is_prime:
            verified += 1
            res = _verify_cached(shape, frozenset([x]), frozenset([x]), config.pow3_cap)
            if res is not None:
                is2.append(x)
            else:
                mnse = mnse_insert_minimal(mnse, make_condition(shape, [x]))
        ckpt.record_base(is2, mnse, len(is_prime))

    names = sorted(is2)
    mgic: list[ISCondition] = []
    sis_pool: set[int] = set()   # singletons seen in layer-2 conditions
    layer_hi = len(names) if config.max_layer is None else min(config.max_layer, len(names))
    tr = layer_hi
    partial = False

    pool = ProcessPoolExecutor(max_workers=config.jobs) if config.jobs > 1 else None
    replay = {rec["i"]: rec for rec in ckpt.layers}
    try:
        i = 0
        while i < layer_hi:
            i += 1
            if i in replay:
                rec = replay[i]
                layer_mgic = [ISCondition.from_json(c) for c in rec["mgic"]]
                layer_fail = [ISCondition.from_json(c) for c in rec["mnse_add"]]
                verified += rec.get("verified", 0)
            else:
                cands = _layer_candidates(names, i, total, [e.nis for e in mnse])
                layer_mgic, layer_fail = [], []
                if conjectural and i > total:
                    # deep layers: every pruned-surviving candidate is taken as
                    # SE; its singletons come from the layer-2 harvest
                    for cand in cands:
                        nis = frozenset(cand)
                        layer_mgic.append(
                            ISCondition(shape=shape, nis=nis, sis=frozenset(nis & sis_pool)))
                else:
                    verified += len(cands)
                    args = [(shape, cand, config.pow3_cap) for cand in cands]
                    if pool is not None:
                        chunk = max(1, len(args) // (config.jobs * 4) or 1)
                        results = pool.map(_worker_verify, args, chunksize=chunk)
                    else:
                        results = map(_worker_verify, args)
                    for cand, res in results:
                        if res is not None:
                            layer_mgic.append(res)
                        else:
                            layer_fail.append(make_condition(shape, cand))
                layer_mgic = _sorted_conditions(layer_mgic)
                layer_fail = _sorted_conditions(layer_fail)
                layer_verified = 0 if (conjectural and i > total) else len(cands)
                ckpt.record_layer(i, layer_mgic, layer_fail, layer_verified)
            mgic.extend(layer_mgic)
            for f in layer_fail:
                mnse = mnse_insert_minimal(mnse, f)
            if i == 2:
                sis_pool = {s for c in mgic if len(c.nis) == 2 for s in c.sis}
            if not layer_mgic and mgic:
                tr = i
                break
        else:
            if config.max_layer is not None and layer_hi < len(names):
                partial = True
    finally:
        if pool is not None:
            pool.shutdown()

    stats = {
        "is": is_all,
        "is_prime": len(is_prime),
        "is_dprime": len(is2),
        "verified": verified,
    }
    if partial:
        stats["partial"] = True
    return SearchReport(
        shape=shape,
        mgic=_sorted_conditions(mgic),
        mnse=_sorted_conditions(mnse),
        tr=tr,
        max_nse=max((len(c.sis) for c in mnse), default=0),
        stats=stats,
        mode="conjectural" if conjectural else "sound",
    )


def discover_improved(shape, config: Optional[RunConfig] = None) -> SearchReport:
    return _discover_layered(shape, config or RunConfig(), conjectural=False)


def discover_conjectural(shape, config: Optional[RunConfig] = None) -> SearchReport:
    return _discover_layered(shape, config or RunConfig(), conjectural=True)


def discover(shape, config: Optional[RunConfig] = None, basic: bool = False) -> SearchReport:
    config = config or RunConfig()
    if basic:
        return discover_basic(shape, config)
    if config.mode == "conjectural":
        return discover_conjectural(shape, config)
    return discover_improved(shape, config)


# reference counts for the verified problem sizes, used by the regression CLI
KNOWN_COUNTS = {
    (0, 1, 0): {"is": 7, "is_prime": None, "is_dprime": None,
                "tr": 7, "mgic": 120, "mnse": 1, "max_nse": 1},
    (0, 1, 1): {"is": 63, "is_prime": 24, "is_dprime": 16,
                "tr": 7, "mgic": 32, "mnse": 18, "max_nse": 2},
    (1, 1, 0): {"is": 63, "is_prime": 24, "is_dprime": 20,
                "tr": 12, "mgic": 1024, "mnse": 13, "max_nse": 2},
    (0, 2, 1): {"is": 511, "is_prime": 63, "is_dprime": 33,
                "tr": 7, "mgic": 60, "mnse": 71, "max_nse": 3},
    (1, 2, 0): {"is": 511, "is_prime": 63, "is_dprime": 42,
                "tr": 15, "mgic": 10240, "mnse": 81, "max_nse": 3},
    (1, 1, 1): {"is": 511, "is_prime": 63, "is_dprime": 45,
                "tr": 16, "mgic": 39392, "mnse": 409, "max_nse": 3},
}
