"""Non-crossing set partitions and non-crossing linked partitions.

Blocks are kept as sorted 1-based tuples and a partition is canonical when
its blocks are sorted by minimum (minima are pairwise distinct for both
structures, so this is well defined).  The text form matches the canonical
order, e.g. ``{{1,2},{2,3}}``.

A linked partition may share single elements between pairs of blocks.  The
convention used throughout: a shared element must be the minimum of exactly
one of the two blocks, and that block must have at least two elements.  In
particular ``{{1,2},{2}}`` is not admitted, and element multiplicity never
exceeds two.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidInputError, SizeLimitError

MAX_NC_N = 12
MAX_NCL_N = 10

Blocks = tuple[tuple[int, ...], ...]


def _canonical_blocks(blocks: Iterable[Iterable[int]]) -> Blocks:
    bs = tuple(tuple(sorted(set(b))) for b in blocks)
    return tuple(sorted(bs, key=lambda b: b[0]))


def _blocks_text(blocks: Blocks) -> str:
    inner = ",".join("{" + ",".join(str(e) for e in b) + "}" for b in blocks)
    return "{" + inner + "}"


def _crosses(a: Sequence[int], b: Sequence[int]) -> bool:
    """True if there exist i < j < k < l with i,k in a and j,l in b.

    Both inputs sorted.  Shared elements do not count: all four inequalities
    are strict.
    """
    if not b:
        return False
    b_max = b[-1]
    for j in b:
        if bisect_left(a, j) == 0:
            continue  # no a-element strictly below j
        pos = bisect_right(a, j)
        if pos >= len(a):
            continue  # no a-element strictly above j
        if b_max > a[pos]:
            return True
    return False


def is_noncrossing(blocks: Iterable[Iterable[int]]) -> bool:
    """Pairwise non-crossing test on raw blocks (duplicates allowed)."""
    bs = [tuple(sorted(b)) for b in blocks]
    for i in range(len(bs)):
        for j in range(i + 1, len(bs)):
            if _crosses(bs[i], bs[j]) or _crosses(bs[j], bs[i]):
                return False
    return True


@dataclass(frozen=True)
class SetPartition:
    """A non-crossing partition of {1, ..., n} with pairwise disjoint blocks."""

    n: int
    blocks: Blocks

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", _canonical_blocks(self.blocks))

    @staticmethod
    def of(n: int, blocks: Iterable[Iterable[int]], validate: bool = True) -> "SetPartition":
        p = SetPartition(n, _canonical_blocks(blocks))
        if validate:
            p.validate()
        return p

    def validate(self) -> None:
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise InvalidInputError("empty block")
            for e in b:
                if not 1 <= e <= self.n:
                    raise InvalidInputError(f"element {e} out of range 1..{self.n}")
                if e in seen:
                    raise InvalidInputError(f"element {e} appears twice")
                seen.add(e)
        if len(seen) != self.n:
            raise InvalidInputError("blocks do not cover 1..n")
        if not is_noncrossing(self.blocks):
            raise InvalidInputError("partition is crossing")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return _blocks_text(self.blocks)


@dataclass(frozen=True)
class LinkedPartition:
    """A non-crossing linked partition of {1, ..., n}."""

    n: int
    blocks: Blocks

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", _canonical_blocks(self.blocks))

    @staticmethod
    def of(n: int, blocks: Iterable[Iterable[int]], validate: bool = True) -> "LinkedPartition":
        p = LinkedPartition(n, _canonical_blocks(blocks))
        if validate:
            p.validate()
        return p

    def validate(self) -> None:
        count: dict[int, int] = {}
        for b in self.blocks:
            if not b:
                raise InvalidInputError("empty block")
            for e in b:
                if not 1 <= e <= self.n:
                    raise InvalidInputError(f"element {e} out of range 1..{self.n}")
                count[e] = count.get(e, 0) + 1
        if set(count) != set(range(1, self.n + 1)):
            raise InvalidInputError("blocks do not cover 1..n")
        if any(c > 2 for c in count.values()):
            raise InvalidInputError("element in more than two blocks")
        for i in range(len(self.blocks)):
            for j in range(i + 1, len(self.blocks)):
                bi, bj = self.blocks[i], self.blocks[j]
                shared = set(bi) & set(bj)
                if len(shared) > 1:
                    raise InvalidInputError("blocks share more than one element")
                if len(shared) == 1:
                    (e,) = shared
                    is_min_i = bi[0] == e
                    is_min_j = bj[0] == e
                    if is_min_i == is_min_j:
                        raise InvalidInputError(
                            f"shared element {e} must be minimal in exactly one block"
                        )
                    opening = bi if is_min_i else bj
                    if len(opening) < 2:
                        raise InvalidInputError(
                            f"block opened at shared element {e} needs >= 2 elements"
                        )
        if not is_noncrossing(self.blocks):
            raise InvalidInputError("linked partition is crossing")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return _blocks_text(self.blocks)


def non_minimal_elements(p: LinkedPartition | SetPartition) -> tuple[int, ...]:
    """Elements that are not the minimum of any block containing them.

    For a linked partition this is the set usually written s(pi); its size
    always equals n minus the number of blocks.
    """
    minima = {b[0] for b in p.blocks}
    members = {e for b in p.blocks for e in b}
    return tuple(sorted(members - minima))


def connected_classes(p: LinkedPartition) -> SetPartition:
    """Merge blocks that share elements; the result is non-crossing."""
    parent = list(range(len(p.blocks)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[int, int] = {}
    for bi, b in enumerate(p.blocks):
        for e in b:
            if e in owner:
                ri, rj = find(owner[e]), find(bi)
                if ri != rj:
                    parent[ri] = rj
            else:
                owner[e] = bi
    classes: dict[int, set[int]] = {}
    for bi, b in enumerate(p.blocks):
        classes.setdefault(find(bi), set()).update(b)
    return SetPartition.of(p.n, classes.values(), validate=False)


def _scan(n: int, allow_links: bool) -> list[Blocks]:
    """Left-to-right stack enumeration.

    The stack holds open blocks, innermost on top.  At each position i we
    either open a fresh block, or join an open block at some depth (closing
    everything above it), or, in the linked case, do both at once: join a
    block as a non-minimal member and open a new block with minimum i.  A
    block opened through such a link must collect a second element before it
    closes; branches violating that are pruned.
    """
    out: list[Blocks] = []
    stack: list[list[int]] = []
    linked: list[bool] = []
    finished: list[list[int]] = []

    def close_above(depth: int) -> int | None:
        """Pop blocks above depth; return count popped, or None if invalid."""
        popped = 0
        for blk, ln in zip(stack[depth:], linked[depth:]):
            if ln and len(blk) < 2:
                return None
        popped = len(stack) - depth
        for _ in range(popped):
            finished.append(stack.pop())
            linked.pop()
        return popped

    def reopen(blocks_popped: int) -> None:
        for _ in range(blocks_popped):
            blk = finished.pop()
            stack.append(blk)
            linked.append(False)  # placeholder, fixed by caller

    def rec(i: int) -> None:
        if i > n:
            if any(ln and len(blk) < 2 for blk, ln in zip(stack, linked)):
                return
            out.append(_canonical_blocks(finished + stack))
            return
        # (a) open a fresh block holding i
        stack.append([i])
        linked.append(False)
        rec(i + 1)
        stack.pop()
        linked.pop()
        # (b) join the block at depth d, closing blocks above it
        #     (c) same, additionally opening a linked block with minimum i
        for d in range(len(stack), 0, -1):
            saved_linked = linked[d:]
            popped = close_above(d)
            if popped is None:
                break  # smaller d pops a superset, also invalid
            stack[d - 1].append(i)
            rec(i + 1)
            if allow_links:
                stack.append([i])
                linked.append(True)
                rec(i + 1)
                stack.pop()
                linked.pop()
            stack[d - 1].pop()
            reopen(popped)
            linked[d:] = saved_linked

    rec(1)
    return sorted(out)


def enumerate_nc(n: int) -> list[SetPartition]:
    """All non-crossing partitions of {1..n} in lexicographic block order."""
    if not 1 <= n <= MAX_NC_N:
        raise SizeLimitError(f"enumerate_nc supports 1 <= n <= {MAX_NC_N}, got {n}")
    return [SetPartition.of(n, bs, validate=False) for bs in _scan(n, allow_links=False)]


def enumerate_ncl(n: int) -> list[LinkedPartition]:
    """All non-crossing linked partitions of {1..n} in lexicographic order."""
    if not 1 <= n <= MAX_NCL_N:
        raise SizeLimitError(f"enumerate_ncl supports 1 <= n <= {MAX_NCL_N}, got {n}")
    return [LinkedPartition.of(n, bs, validate=False) for bs in _scan(n, allow_links=True)]


def linked_class(sigma: SetPartition) -> list[LinkedPartition]:
    """All linked partitions whose connected classes equal sigma."""
    sigma.validate()
    if not is_noncrossing(sigma.blocks):
        raise InvalidInputError("linked_class requires a non-crossing partition")
    sig = _canonical_blocks(sigma.blocks)
    return [
        p
        for p in enumerate_ncl(sigma.n)
        if connected_classes(p).blocks == sig
    ]


def parse_partition_text(text: str, n: int | None = None, linked: bool = False):
    """Parse the canonical text form, e.g. ``{{1,2},{2,3}}``."""
    s = text.strip().replace(" ", "")
    if not (s.startswith("{{") and s.endswith("}}")):
        raise InvalidInputError(f"bad partition text: {text!r}")
    body = s[1:-1]
    blocks: list[list[int]] = []
    for part in body.replace("},{", "}|{").split("|"):
        if not (part.startswith("{") and part.endswith("}")):
            raise InvalidInputError(f"bad block in: {text!r}")
        try:
            blocks.append([int(tok) for tok in part[1:-1].split(",")])
        except ValueError as exc:
            raise InvalidInputError(f"bad element in: {text!r}") from exc
    if n is None:
        n = max(e for b in blocks for e in b)
    cls = LinkedPartition if linked else SetPartition
    return cls.of(n, blocks)
