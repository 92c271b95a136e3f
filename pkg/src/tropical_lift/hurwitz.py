"""Hurwitz numbers by monodromy enumeration in the symmetric group.

H^d_{g',g}(mu_1..mu_s) counts tuples (a_1,b_1,..,a_g,b_g, s_1..s_s, t_1..t_R)
in S_d with [a_1,b_1]...[a_g,b_g] s_1...s_s t_1...t_R = 1, s_i of cycle type
mu_i, t_j transpositions, generating a transitive group; the value is the
count divided by d!.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Iterable, Sequence

from .chipfiring import BudgetExceeded

Perm = tuple[int, ...]
Partition = tuple[int, ...]

DEFAULT_MAX_DEGREE = 6
DEFAULT_MAX_FACTORS = 10
DEFAULT_WORK_BUDGET = 5_000_000


class HurwitzUndefined(ValueError):
    """The query has R < 0, so no Hurwitz set is defined."""


class WildRamification(ValueError):
    """A profile has a part divisible by the characteristic."""


def partition(parts: Iterable[int]) -> Partition:
    p = tuple(sorted((int(x) for x in parts), reverse=True))
    if any(x <= 0 for x in p):
        raise ValueError(f"partition parts must be positive: {p}")
    return p


def is_tame(mu: Sequence[int], char: int) -> bool:
    return char == 0 or all(x % char for x in mu)


def is_trivial(mu: Sequence[int]) -> bool:
    return all(x == 1 for x in mu)


@dataclass(frozen=True)
class HurwitzQuery:
    d: int
    g: int
    gprime: int
    profiles: tuple[Partition, ...] = ()

    def __post_init__(self):
        profs = tuple(partition(m) for m in self.profiles)
        object.__setattr__(self, "profiles", profs)
        if self.d < 1 or self.g < 0 or self.gprime < 0:
            raise ValueError("need d >= 1 and nonnegative genera")
        for m in profs:
            if sum(m) != self.d:
                raise ValueError(f"profile {m} is not a partition of {self.d}")

    @property
    def s(self) -> int:
        return len(self.profiles)


@dataclass(frozen=True)
class RData:
    R: int
    parity_sum: int  # R + sum(d - l(mu_i)); always even

    @property
    def parity_ok(self) -> bool:
        return self.parity_sum % 2 == 0


def compute_R(q: HurwitzQuery) -> RData:
    R = q.d * (2 - 2 * q.g) + 2 * q.gprime - 2 - q.s * q.d + sum(len(m) for m in q.profiles)
    return RData(R, R + sum(q.d - len(m) for m in q.profiles))


# ---------------------------------------------------------------------------
# permutations


def compose(p: Perm, q: Perm) -> Perm:
    """Left-to-right product: apply p, then q."""
    return tuple(q[i] for i in p)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def cycle_type(p: Perm) -> Partition:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if not seen[i]:
            n = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                n += 1
            out.append(n)
    return tuple(sorted(out, reverse=True))


def cycles(p: Perm) -> list[tuple[int, ...]]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if not seen[i]:
            c = []
            j = i
            while not seen[j]:
                seen[j] = True
                c.append(j)
                j = p[j]
            out.append(tuple(c))
    return out


@lru_cache(maxsize=None)
def all_perms(d: int) -> tuple[Perm, ...]:
    return tuple(permutations(range(d)))


@lru_cache(maxsize=None)
def conjugacy_class(d: int, mu: Partition) -> tuple[Perm, ...]:
    """Permutations of cycle type mu in lexicographic one-line order."""
    return tuple(p for p in all_perms(d) if cycle_type(p) == mu)


Blocks = tuple[int, ...]  # block label per point: the least element of its block


def _blocks_of(p: Perm) -> Blocks:
    lab = list(range(len(p)))
    for c in cycles(p):
        m = min(c)
        for x in c:
            lab[x] = m
    return tuple(lab)


def _join(a: Blocks, b: Blocks) -> Blocks:
    if a == b:
        return a
    parent = list(range(len(a)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for lab in (a, b):
        for i, m in enumerate(lab):
            ri, rm = find(i), find(m)
            if ri != rm:
                parent[max(ri, rm)] = min(ri, rm)
    return tuple(find(i) for i in range(len(a)))


@lru_cache(maxsize=None)
def _commutator_table(d: int):
    """(commutator, orbit blocks of <a,b>) -> (count, lexicographically first pair)."""
    table: dict[tuple[Perm, Blocks], list] = {}
    for a in all_perms(d):
        ia = inverse(a)
        ba = _blocks_of(a)
        for b in all_perms(d):
            c = compose(compose(compose(a, b), ia), inverse(b))
            key = (c, _join(ba, _blocks_of(b)))
            hit = table.get(key)
            if hit is None:
                table[key] = [1, (a, b)]
            else:
                hit[0] += 1
    return tuple((c, bl, n, w) for (c, bl), (n, w) in sorted(table.items()))


# ---------------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class HurwitzResult:
    value: Fraction
    raw_count: int
    witness: tuple[Perm, ...] | None = None
    R: int = 0


@dataclass(frozen=True)
class Budget:
    max_degree: int = DEFAULT_MAX_DEGREE
    max_factors: int = DEFAULT_MAX_FACTORS
    work: int = DEFAULT_WORK_BUDGET


class _Counter:
    """Memoized count over factor positions; state = (product so far, orbit blocks)."""

    def __init__(self, d: int, genus_pairs: int, classes: Sequence[Partition], work: int):
        self.d = d
        self.pairs = genus_pairs
        self.classes = [conjugacy_class(d, mu) for mu in classes]
        self.blocks = [[_blocks_of(p) for p in cls] for cls in self.classes]
        self.types = list(classes)
        self.nfactors = genus_pairs + len(classes)
        self.memo: dict = {}
        self.work = work
        self.spent = 0
        self.identity = tuple(range(d))
        self.full = tuple([0] * d)
        self.commutators = _commutator_table(d) if genus_pairs else ()

    def _tick(self, n=1):
        self.spent += n
        if self.spent > self.work:
            raise BudgetExceeded(f"Hurwitz enumeration exceeded work budget {self.work}")

    def count(self, pos: int, prod: Perm, blocks: Blocks) -> int:
        key = (pos, prod, blocks)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if pos == self.nfactors:
            res = int(prod == self.identity and blocks == self.full)
        elif pos < self.pairs:
            res = 0
            self._tick(len(self.commutators))
            for c, bl, n, _ in self.commutators:
                res += n * self.count(pos + 1, compose(prod, c), _join(blocks, bl))
        else:
            k = pos - self.pairs
            if pos == self.nfactors - 1:
                last = inverse(prod)
                self._tick()
                if cycle_type(last) != self.types[k]:
                    res = 0
                else:
                    res = int(_join(blocks, _blocks_of(last)) == self.full)
            else:
                res = 0
                self._tick(len(self.classes[k]))
                for x, bx in zip(self.classes[k], self.blocks[k]):
                    res += self.count(pos + 1, compose(prod, x), _join(blocks, bx))
        self.memo[key] = res
        return res

    def witness(self) -> tuple[Perm, ...] | None:
        prod, blocks = self.identity, tuple(range(self.d))
        if self.count(0, prod, blocks) == 0:
            return None
        out: list[Perm] = []
        for pos in range(self.nfactors):
            if pos < self.pairs:
                # lexicographically least pair over all entries that can be completed
                best = None
                for c, bl, _, (a, b) in self.commutators:
                    if self.count(pos + 1, compose(prod, c), _join(blocks, bl)):
                        if best is None or (a, b) < best[0]:
                            best = ((a, b), c, bl)
                (a, b), c, bl = best
                out += [a, b]
                prod, blocks = compose(prod, c), _join(blocks, bl)
            else:
                k = pos - self.pairs
                for x, bx in zip(self.classes[k], self.blocks[k]):
                    nxt = compose(prod, x)
                    nb = _join(blocks, bx)
                    if self.count(pos + 1, nxt, nb):
                        out.append(x)
                        prod, blocks = nxt, nb
                        break
        return tuple(out)


def count_tuples(d: int, g: int, profiles: Sequence[Sequence[int]], transpositions: int,
                 budget: Budget | None = None, want_witness: bool = False):
    """Raw number of transitive tuples with product one (no R consistency check)."""
    budget = budget or Budget()
    if d > budget.max_degree:
        raise BudgetExceeded(f"degree {d} exceeds the configured bound {budget.max_degree}")
    classes = [partition(m) for m in profiles] + [(2,) + (1,) * (d - 2)] * transpositions
    if 2 * g + len(classes) > budget.max_factors:
        raise BudgetExceeded(f"{2 * g + len(classes)} factors exceed the configured bound {budget.max_factors}")
    ctr = _Counter(d, g, classes, budget.work)
    n = ctr.count(0, ctr.identity, tuple(range(d)))
    w = ctr.witness() if want_witness and n else None
    return n, w


def hurwitz_number(q: HurwitzQuery, budget: Budget | None = None) -> HurwitzResult:
    R = compute_R(q).R
    if R < 0:
        raise HurwitzUndefined(f"R = {R} < 0: Hurwitz number undefined")
    n, w = count_tuples(q.d, q.g, q.profiles, R, budget, want_witness=True)
    return HurwitzResult(Fraction(n, math.factorial(q.d)), n, w, R)


def hurwitz_bruteforce(q: HurwitzQuery) -> int:
    """Raw tuple count by plain depth-first enumeration (test oracle; tiny inputs only)."""
    d = q.d
    R = compute_R(q).R
    if R < 0:
        raise HurwitzUndefined(f"R = {R} < 0")
    perms = list(permutations(range(d)))
    transp = (2,) + (1,) * (d - 2) if d >= 2 else (1,)
    if d == 1 and R:
        return 0
    choices: list[list[Perm]] = []
    for _ in range(2 * q.g):
        choices.append(perms)
    for mu in list(q.profiles) + [transp] * R:
        choices.append([p for p in perms if cycle_type(p) == tuple(mu)])
    if not choices:
        return 1 if d == 1 else 0
    ident = tuple(range(d))

    def product(tup):
        out = ident
        for i in range(q.g):
            a, b = tup[2 * i], tup[2 * i + 1]
            out = compose(out, compose(compose(compose(a, b), inverse(a)), inverse(b)))
        for x in tup[2 * q.g:]:
            out = compose(out, x)
        return out

    def transitive(tup):
        seen = {0}
        todo = [0]
        while todo:
            i = todo.pop()
            for p in tup:
                j = p[i]
                if j not in seen:
                    seen.add(j)
                    todo.append(j)
        return len(seen) == d

    total = 0

    def rec(prefix):
        nonlocal total
        if len(prefix) == len(choices):
            if product(prefix) == ident and transitive(prefix):
                total += 1
            return
        for x in choices[len(prefix)]:
            rec(prefix + [x])

    rec([])
    return total


# ---------------------------------------------------------------------------
# decisions built on the count


def _check_tame(profiles, char):
    for m in profiles:
        if not is_tame(m, char):
            raise WildRamification(f"wild ramification out of scope: {m} in characteristic {char}")


def nontrivial(profiles) -> tuple[Partition, ...]:
    return tuple(partition(m) for m in profiles if not is_trivial(m))


def profile_set_nonempty(q: HurwitzQuery, char: int = 0, budget: Budget | None = None):
    """True/False, or the string "unknown" when 0 < char <= d and no shortcut applies."""
    _check_tame(q.profiles, char)
    if compute_R(q).R < 0:
        return False
    rest = nontrivial(q.profiles)
    if not rest:
        return True
    if q.g == 0 and q.gprime == 0 and rest == ((q.d,), (q.d,)):
        return True
    if char == 0 or char > q.d:
        return hurwitz_number(q, budget).value != 0
    return "unknown"


def genus_bound(d: int, g: int, profiles) -> Fraction:
    defect = sum(d - len(m) for m in profiles)
    if g == 0:
        return Fraction(1 + defect)
    return Fraction(1 + (g - 1) * d) + Fraction(defect, 2)


@dataclass(frozen=True)
class MinGenus:
    gprime: int
    bound: Fraction
    result: HurwitzResult


def minimal_source_genus(d: int, g: int, profiles, char: int = 0, budget: Budget | None = None) -> MinGenus:
    profiles = tuple(partition(m) for m in profiles)
    _check_tame(profiles, char)
    if 0 < char <= d:
        raise ValueError(f"characteristic {char} <= degree {d}: no decision procedure")
    bound = genus_bound(d, g, profiles)
    gp = 0
    while compute_R(HurwitzQuery(d, g, gp, profiles)).R < 0:
        gp += 1
    while True:
        res = hurwitz_number(HurwitzQuery(d, g, gp, profiles), budget)
        if res.value:
            return MinGenus(gp, bound, res)
        if gp >= bound:
            raise RuntimeError(f"no source genus up to the bound {bound} (g'={gp})")
        gp += 1


@dataclass(frozen=True)
class Padding:
    d: int
    profiles: tuple[Partition, ...]
    result: HurwitzResult


def pad_profiles(d: int, gprime: int, profiles, char: int = 0, budget: Budget | None = None) -> Padding:
    """Smallest d' >= d such that adding ones to each profile gives a nonempty set over genus 0."""
    budget = budget or Budget()
    profiles = tuple(partition(m) for m in profiles)
    _check_tame(profiles, char)
    for dp in range(d, budget.max_degree + 1):
        padded = tuple(m + (1,) * (dp - d) for m in profiles)
        q = HurwitzQuery(dp, 0, gprime, padded)
        if compute_R(q).R < 0:
            continue
        res = hurwitz_number(q, budget)
        if res.value:
            return Padding(dp, padded, res)
    raise BudgetExceeded(f"no padding found up to degree {budget.max_degree}")
