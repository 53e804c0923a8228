"""Finite windows of the partial-fraction basis of Q[t, 1/q]."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .laurent import INF
from .regfun import Label, RegFun, label_order, label_point


@dataclass(frozen=True)
class Window:
    """Pole-order bounds per boundary point.

    ``poly_degree`` bounds the polynomial part (t^0 .. t^K; -1 means none),
    ``pole_orders`` maps each finite point c to J (terms (t-c)^-1 .. (t-c)^-J).
    """

    poly_degree: int
    pole_orders: tuple[tuple[Fraction, int], ...]

    @classmethod
    def make(cls, poly_degree: int, pole_orders: Mapping | Iterable[tuple]) -> "Window":
        items = pole_orders.items() if isinstance(pole_orders, Mapping) else pole_orders
        return cls(int(poly_degree), tuple(sorted((Fraction(c), max(0, int(j))) for c, j in items)))

    @classmethod
    def uniform(cls, points: Iterable, bound: int) -> "Window":
        return cls.make(bound, {c: bound for c in points})

    def bound(self, point) -> int:
        if point is INF:
            return self.poly_degree
        for c, j in self.pole_orders:
            if c == point:
                return j
        raise KeyError(point)

    def labels(self) -> list[Label]:
        out: list[Label] = [("t", k) for k in range(self.poly_degree + 1)]
        for c, j in self.pole_orders:
            out.extend(("p", c, i) for i in range(1, j + 1))
        return out

    def __len__(self) -> int:
        return self.poly_degree + 1 + sum(j for _, j in self.pole_orders)

    def contains(self, label: Label) -> bool:
        pt = label_point(label)
        return label_order(label) <= self.bound(pt)

    def contains_fun(self, f: RegFun) -> bool:
        return all(self.contains(lab) for lab in f.partial_fractions())

    def widen(self, delta_inf: int, delta_finite: Mapping | int) -> "Window":
        if isinstance(delta_finite, int):
            delta_finite = {c: delta_finite for c, _ in self.pole_orders}
        return Window.make(
            max(-1, self.poly_degree + delta_inf),
            {c: j + delta_finite[c] for c, j in self.pole_orders},
        )

    def union(self, other: "Window") -> "Window":
        pts = dict(self.pole_orders)
        for c, j in other.pole_orders:
            pts[c] = max(pts.get(c, 0), j)
        return Window.make(max(self.poly_degree, other.poly_degree), pts)

    def as_dict(self) -> dict:
        return {"inf": self.poly_degree, **{str(c): j for c, j in self.pole_orders}}
