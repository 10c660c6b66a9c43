"""Integer linear combinations of module labels (Grothendieck ring elements)."""
from __future__ import annotations

from typing import Callable, Hashable, Iterable


class UnnormalizedLabel(ValueError):
    pass


class FusionElement(dict):
    """Finite integer combination ``sum_x n_x [x]``; zero entries are dropped.

    ``notes`` collects free-form flags raised while the element was built
    (e.g. that a standard module was replaced by its composition factors).
    """

    def __init__(self, items=(), notes: Iterable[str] = ()):
        super().__init__()
        self.notes: set[str] = set(notes)
        pairs = items.items() if isinstance(items, dict) else items
        for lab, n in pairs:
            self.add(lab, n)
        if isinstance(items, FusionElement):
            self.notes |= items.notes

    @classmethod
    def of(cls, label: Hashable, n: int = 1) -> "FusionElement":
        return cls([(label, n)])

    def add(self, label, n=1):
        n = self.get(label, 0) + n
        if n:
            self[label] = n
        else:
            self.pop(label, None)
        return self

    def __add__(self, other: "FusionElement") -> "FusionElement":
        out = FusionElement(self, self.notes | other.notes)
        for lab, n in other.items():
            out.add(lab, n)
        return out

    def __sub__(self, other: "FusionElement") -> "FusionElement":
        return self + other.scaled(-1)

    def scaled(self, c: int) -> "FusionElement":
        return FusionElement({lab: c * n for lab, n in self.items()}, self.notes)

    def __eq__(self, other):
        if isinstance(other, dict):
            return dict.__eq__(self, other)
        return NotImplemented

    __hash__ = None

    def total(self) -> int:
        return sum(self.values())

    def sorted_items(self, key: Callable | None = None):
        return sorted(self.items(), key=(lambda kv: key(kv[0])) if key else (lambda kv: str(kv[0])))

    def __repr__(self):
        if not self:
            return "0"
        return " + ".join(f"{n}*{lab}" if n != 1 else f"{lab}" for lab, n in self.sorted_items())


def bilinear(product: Callable, x: FusionElement, y: FusionElement) -> FusionElement:
    """Extend a label-level product bilinearly to ring elements."""
    out = FusionElement(notes=x.notes | y.notes)
    for a, m in x.items():
        for b, n in y.items():
            out = out + product(a, b).scaled(m * n)
    return out
