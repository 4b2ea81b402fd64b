"""Sort hierarchy with appropriateness conditions.

The surface syntax is the ALE one::

    sign sub [lexical,phrase]
       intro [phon:list_string, synsem:synsem].

``bot`` is the most general sort.  A sort A is *below* B (``subsort(A, B)``)
when A is at least as specific as B.  The greatest lower bound of two sorts is
their most general common subsort, or ``None`` when they are incompatible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import SignatureError

TOP = "bot"

_CLAUSE_RE = re.compile(
    r"^\s*(?P<name>[^\s\[\]]+)\s+sub\s*\[(?P<subs>[^\]]*)\]"
    r"(?:\s*intro\s*\[(?P<intro>[^\]]*)\])?\s*$",
    re.S,
)


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("%", 1)[0] for line in text.splitlines())


def _split_names(chunk: str) -> list[str]:
    return [p.strip() for p in chunk.split(",") if p.strip()]


def _parse_clauses(text: str):
    """Yield (line, name, subsorts, [(feat, value)]) for every clause."""
    text = _strip_comments(text)
    pos = 0
    for m in re.finditer(r"\.(?=\s|$)", text):
        chunk = text[pos:m.start()]
        start_line = text.count("\n", 0, pos + len(chunk) - len(chunk.lstrip())) + 1
        pos = m.end()
        if not chunk.strip():
            continue
        cm = _CLAUSE_RE.match(chunk)
        if cm is None:
            raise SignatureError(f"line {start_line}: cannot parse clause {chunk.strip()[:40]!r}")
        intro = []
        for item in _split_names(cm.group("intro") or ""):
            if ":" not in item:
                raise SignatureError(f"line {start_line}: bad feature declaration {item!r}")
            f, v = (s.strip() for s in item.split(":", 1))
            intro.append((f, v))
        yield start_line, cm.group("name"), _split_names(cm.group("subs")), intro
    if text[pos:].strip():
        raise SignatureError(f"line {text.count(chr(10), 0, pos) + 1}: trailing text without final '.'")


@dataclass
class Signature:
    """Validated sort lattice.  Immutable after construction."""

    sorts: list[str]
    direct_subsorts: dict[str, list[str]]
    intro: dict[str, dict[str, str]]
    # derived tables, filled by _finish
    index: dict[str, int] = field(default_factory=dict, repr=False)
    below: list[int] = field(default_factory=list, repr=False)  # bitset of subsorts (reflexive)
    above: list[int] = field(default_factory=list, repr=False)  # bitset of supersorts (reflexive)
    approp: dict[str, dict[str, str]] = field(default_factory=dict, repr=False)
    feature_intro: dict[str, str] = field(default_factory=dict, repr=False)
    _glb: list[list[int]] = field(default_factory=list, repr=False)

    # -- queries -----------------------------------------------------------

    def _id(self, s: str) -> int:
        try:
            return self.index[s]
        except KeyError:
            raise SignatureError(f"unknown sort {s!r}") from None

    def __contains__(self, s: str) -> bool:
        return s in self.index

    def glb(self, s1: str, s2: str) -> str | None:
        g = self._glb[self._id(s1)][self._id(s2)]
        return None if g < 0 else self.sorts[g]

    def glb_id(self, a: int, b: int) -> int:
        return self._glb[a][b]

    def subsort(self, s1: str, s2: str) -> bool:
        return bool(self.below[self._id(s2)] >> self._id(s1) & 1)

    def subsort_id(self, a: int, b: int) -> bool:
        return bool(self.below[b] >> a & 1)

    def appropriate_features(self, s: str) -> dict[str, str]:
        self._id(s)
        return dict(self.approp[s])

    def leaf_sorts(self, s: str) -> set[str]:
        bits = self.below[self._id(s)]
        return {self.sorts[i] for i in _bits(bits) if not self.direct_subsorts[self.sorts[i]]}

    def supersorts(self, s: str) -> list[str]:
        return [self.sorts[i] for i in _bits(self.above[self._id(s)])]

    def subsorts(self, s: str) -> list[str]:
        return [self.sorts[i] for i in _bits(self.below[self._id(s)])]

    def is_leaf(self, s: str) -> bool:
        return not self.direct_subsorts[s]

    def introducer(self, feat: str) -> str:
        try:
            return self.feature_intro[feat]
        except KeyError:
            raise SignatureError(f"unknown feature {feat!r}") from None

    def lub(self, s1: str, s2: str) -> str:
        """Most specific common supersort (always exists, ``bot`` at worst)."""
        common = self.above[self._id(s1)] & self.above[self._id(s2)]
        best = None
        for i in _bits(common):
            if best is None or self.below[best] >> i & 1:
                best = i
        return self.sorts[best]


def _bits(x: int):
    i = 0
    while x:
        if x & 1:
            yield i
        x >>= 1
        i += 1


def load_signature(text: str) -> Signature:
    """Parse and validate a signature source."""
    order: list[str] = [TOP]
    subs: dict[str, list[str]] = {TOP: []}
    intro: dict[str, dict[str, str]] = {TOP: {}}
    declared: dict[str, int] = {}

    def note(s: str):
        if s not in subs:
            subs[s] = []
            intro[s] = {}
            order.append(s)

    for line, name, children, feats in _parse_clauses(text):
        if name in declared:
            raise SignatureError(f"line {line}: duplicate sort {name!r} (first declared on line {declared[name]})")
        declared[name] = line
        note(name)
        for c in children:
            if c == name:
                raise SignatureError(f"line {line}: cycle in hierarchy at {name!r}")
            note(c)
            if c not in subs[name]:  # repeated child names are harmless
                subs[name].append(c)
        for f, v in feats:
            if f in intro[name]:
                raise SignatureError(f"line {line}: feature {f!r} declared twice on {name!r}")
            intro[name][f] = v

    for s in order:
        if s != TOP and not any(s in subs[p] for p in order):
            subs[TOP].append(s)

    sig = Signature(sorts=order, direct_subsorts=subs, intro=intro)
    _finish(sig)
    return sig


def _finish(sig: Signature) -> None:
    sorts = sig.sorts
    n = len(sorts)
    sig.index = {s: i for i, s in enumerate(sorts)}
    idx = sig.index
    parents: dict[str, list[str]] = {s: [] for s in sorts}
    for p, cs in sig.direct_subsorts.items():
        for c in cs:
            parents[c].append(p)

    # topological order from the top; detects cycles
    topo: list[str] = []
    state: dict[str, int] = {}

    def visit(s: str, path: list[str]):
        st = state.get(s)
        if st == 1:
            cyc = path[path.index(s):] + [s]
            raise SignatureError("cycle in hierarchy: " + " < ".join(cyc))
        if st == 2:
            return
        state[s] = 1
        path.append(s)
        for p in parents[s]:
            visit(p, path)
        path.pop()
        state[s] = 2
        topo.append(s)

    for s in sorts:
        visit(s, [])

    above = [0] * n
    for s in topo:  # parents come first
        bits = 1 << idx[s]
        for p in parents[s]:
            bits |= above[idx[p]]
        above[idx[s]] = bits
    below = [0] * n
    for i in range(n):
        for j in _bits(above[i]):
            below[j] |= 1 << i
    sig.above, sig.below = above, below

    for s in sorts:
        for f, v in sig.intro[s].items():
            if v not in idx:
                raise SignatureError(f"unknown value sort {v!r} for feature {f!r} on {s!r}")

    # greatest lower bounds, with bounded completeness enforced
    glb = [[-1] * n for _ in range(n)]
    for a in range(n):
        ra = glb[a]
        ba = below[a]
        for b in range(a, n):
            common = ba & below[b]
            if not common:
                continue
            g = -1
            for c in _bits(common):
                if below[c] == common:
                    g = c
                    break
            if g < 0:
                raise SignatureError(
                    f"no unique greatest lower bound for ({sorts[a]}, {sorts[b]})")
            ra[b] = g
            glb[b][a] = g
    sig._glb = glb

    # feature introduction: every feature has a single most general introducer
    owners: dict[str, list[str]] = {}
    for s in sorts:
        for f in sig.intro[s]:
            owners.setdefault(f, []).append(s)
    for f, ss in owners.items():
        tops = [s for s in ss if not any(t != s and below[idx[t]] >> idx[s] & 1 for t in ss)]
        if len(tops) > 1:
            raise SignatureError(f"feature {f!r} introduced twice, on {tops[0]!r} and {tops[1]!r}")
        sig.feature_intro[f] = tops[0]

    # appropriateness closure: inherited features, narrowed value sorts
    approp: dict[str, dict[str, str]] = {}
    for s in topo:
        fs: dict[str, str] = {}
        for p in parents[s]:
            for f, v in approp[p].items():
                fs[f] = v if f not in fs else _meet(sig, fs[f], v, s, f)
        for f, v in sig.intro[s].items():
            fs[f] = v if f not in fs else _meet(sig, fs[f], v, s, f)
        approp[s] = fs
    # stable feature order: order of introduction from the top down
    rank = {}
    for s in topo:
        for f in sig.intro[s]:
            rank.setdefault(f, len(rank))
    sig.approp = {s: dict(sorted(fs.items(), key=lambda kv: rank[kv[0]])) for s, fs in approp.items()}
    for f, s in sig.feature_intro.items():
        for t in sig.subsorts(s):
            if f not in sig.approp[t]:  # pragma: no cover - closure guarantees this
                raise SignatureError(f"feature {f!r} missing on {t!r}")


def _meet(sig: Signature, v1: str, v2: str, s: str, f: str) -> str:
    g = sig.glb(v1, v2)
    if g is None:
        raise SignatureError(f"incompatible value sorts {v1!r} and {v2!r} for {f!r} on {s!r}")
    return g
