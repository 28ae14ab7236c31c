"""Finite permutations of level indices, with partial maps for leaky windows.

A ``Permutation`` maps level indices 1..n to level indices 1..n.  An image of
``None`` means the state leaves the tracked window (or diverges) and the map
is then a partial injection; composition and inversion propagate ``None``.

Composition convention: ``compose(p, q)`` applies ``p`` first and then ``q``,
i.e. it is the function composition q o p read right to left.  This matches
running cycle ``p`` and then cycle ``q``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .errors import DomainError


class Permutation:
    __slots__ = ("_images",)

    def __init__(self, images: Iterable[int | None]):
        images = tuple(None if v is None else int(v) for v in images)
        n = len(images)
        seen = set()
        for v in images:
            if v is None:
                continue
            if not 1 <= v <= n:
                raise DomainError(f"image {v} outside 1..{n}")
            if v in seen:
                raise DomainError(f"image {v} repeated; not injective")
            seen.add(v)
        self._images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(1, n + 1))

    @classmethod
    def swap(cls, n: int, a: int, b: int) -> "Permutation":
        images = list(range(1, n + 1))
        images[a - 1], images[b - 1] = b, a
        return cls(images)

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]]) -> "Permutation":
        images = list(range(1, n + 1))
        for cyc in cycles:
            for i, a in enumerate(cyc):
                images[a - 1] = cyc[(i + 1) % len(cyc)]
        return cls(images)

    @property
    def size(self) -> int:
        return len(self._images)

    @property
    def images(self) -> tuple[int | None, ...]:
        return self._images

    @property
    def is_partial(self) -> bool:
        return None in self._images

    def __len__(self):
        return len(self._images)

    def __call__(self, n: int) -> int | None:
        if not 1 <= n <= len(self._images):
            raise DomainError(f"level {n} outside 1..{len(self._images)}")
        return self._images[n - 1]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self._images == other._images

    def __hash__(self):
        return hash(self._images)

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self._images, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles of a bijection, each starting at its smallest element."""
        if self.is_partial:
            raise DomainError("partial maps have no cycle decomposition")
        out, seen = [], set()
        for start in range(1, self.size + 1):
            if start in seen:
                continue
            cyc, k = [], start
            while k not in seen:
                seen.add(k)
                cyc.append(k)
                k = self._images[k - 1]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def __str__(self):
        if not self.is_partial:
            cycles = self.cycles()
            return "".join("(" + " ".join(map(str, c)) + ")" for c in cycles) or "()"
        return ", ".join(f"{i}->{'out' if v is None else v}" for i, v in enumerate(self._images, start=1))

    def __repr__(self):
        return f"Permutation({list(self._images)!r})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply ``p`` first, then ``q``."""
    if p.size != q.size:
        raise DomainError(f"size mismatch: {p.size} vs {q.size}")
    return Permutation(None if v is None else q(v) for v in p.images)


def compose_all(perms: Sequence[Permutation], n: int | None = None) -> Permutation:
    """Compose in sequence order; the empty sequence gives the identity of size ``n``."""
    if not perms:
        if n is None:
            raise DomainError("need a size for the empty composition")
        return Permutation.identity(n)
    out = perms[0]
    for q in perms[1:]:
        out = compose(out, q)
    return out


def inverse(p: Permutation) -> Permutation:
    images: list[int | None] = [None] * p.size
    for i, v in enumerate(p.images, start=1):
        if v is not None:
            images[v - 1] = i
    return Permutation(images)
