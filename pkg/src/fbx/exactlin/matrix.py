"""Exact dense matrices over Q and an incremental sparse echelon engine."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .poly import as_rat

SparseVec = dict  # column key -> nonzero Fraction


def _axpy(target: dict, c: Fraction, src: Mapping) -> None:
    """target -= c * src, in place, dropping zeros."""
    for k, v in src.items():
        nv = target.get(k, 0) - c * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class Echelon:
    """Fully reduced row echelon basis built one vector at a time.

    Every stored vector has coefficient 1 at its pivot and 0 at all other
    pivots. ``priority`` ranks keys for pivot choice (lowest first), which
    lets callers put "must vanish" coordinates ahead of the rest. With
    ``track=True`` each stored vector carries the combination of input tags
    that produced it, so kernel relations and preimages can be read off.
    """

    def __init__(self, priority: Callable[[Hashable], object] | None = None, track: bool = False):
        self.rows: dict[Hashable, dict] = {}
        self.tags: dict[Hashable, dict] = {}
        self.priority = priority or (lambda k: k)
        self.track = track

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping, tag: Mapping | None = None) -> tuple[dict, dict]:
        v = {k: as_rat(c) for k, c in vec.items() if c}
        t = dict(tag) if tag else {}
        for p in [k for k in v if k in self.rows]:
            c = v.get(p)
            if c:
                _axpy(v, c, self.rows[p])
                if self.track:
                    _axpy(t, c, self.tags[p])
        return v, t

    def add(self, vec: Mapping, tag: Mapping | None = None) -> dict | None:
        """Insert a vector. Returns the tag relation if it was dependent."""
        v, t = self.reduce(vec, tag)
        if not v:
            return t
        p = min(v, key=self.priority)
        inv = 1 / v[p]
        v = {k: c * inv for k, c in v.items()}
        if self.track:
            t = {k: c * inv for k, c in t.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                _axpy(row, c, v)
                if self.track:
                    _axpy(self.tags[q], c, t)
        self.rows[p] = v
        if self.track:
            self.tags[p] = t
        return None

    def contains(self, vec: Mapping) -> bool:
        v, _ = self.reduce(vec)
        return not v

    def pivots(self) -> list:
        return sorted(self.rows, key=self.priority)


class MatrixQ:
    """Immutable rows x cols matrix of Fractions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[Iterable] | None = None):
        if entries is None:
            data = tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))
        else:
            data = tuple(tuple(as_rat(x) for x in row) for row in entries)
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entries do not form a {rows}x{cols} matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", data)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixQ is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "MatrixQ":
        rows = [list(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "MatrixQ":
        return cls(rows, len(columns), [[col[i] for col in columns] for i in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "MatrixQ":
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "MatrixQ":
        return cls(rows, cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatrixQ)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        body = [[str(x) for x in row] for row in self.entries]
        return f"MatrixQ({self.rows}x{self.cols}, {body})"

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "MatrixQ":
        return MatrixQ(self.cols, self.rows, [self.column(j) for j in range(self.cols)])

    @property
    def T(self) -> "MatrixQ":
        return self.transpose()

    def __matmul__(self, other: "MatrixQ") -> "MatrixQ":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols = [other.column(j) for j in range(other.cols)]
        out = []
        for row in self.entries:
            out.append([sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in cols])
        return MatrixQ(self.rows, other.cols, out)

    def apply(self, vec: Sequence) -> tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(
            sum((a * as_rat(b) for a, b in zip(row, vec) if a and b), Fraction(0))
            for row in self.entries
        )

    def is_zero(self) -> bool:
        return all(not x for row in self.entries for x in row)

    def _column_echelon(self) -> tuple[Echelon, list[dict]]:
        ech = Echelon(track=True)
        relations = []
        for j in range(self.cols):
            col = {i: self.entries[i][j] for i in range(self.rows) if self.entries[i][j]}
            rel = ech.add(col, {j: Fraction(1)})
            if rel is not None:
                relations.append(rel)
        return ech, relations

    def rank(self) -> int:
        return self._column_echelon()[0].rank


def mat_kernel(m: MatrixQ) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel, as column vectors."""
    _, relations = m._column_echelon()
    return [tuple(rel.get(j, Fraction(0)) for j in range(m.cols)) for rel in relations]


def mat_rank(m: MatrixQ) -> int:
    return m.rank()


def mat_cokernel(m: MatrixQ) -> tuple[int, MatrixQ]:
    """Dimension of Q^rows / im(m) and a full-row-rank projection P with P m = 0."""
    left = mat_kernel(m.transpose())
    return len(left), MatrixQ(len(left), m.rows, left)


def mat_solve(m: MatrixQ, rhs: Sequence) -> tuple[Fraction, ...] | None:
    """Some x with m x = rhs, or None if the system is inconsistent."""
    ech = Echelon(track=True)
    for j in range(m.cols):
        col = {i: m.entries[i][j] for i in range(m.rows) if m.entries[i][j]}
        ech.add(col, {j: Fraction(1)})
    rem, comb = ech.reduce({i: as_rat(x) for i, x in enumerate(rhs) if x})
    if rem:
        return None
    return tuple(-comb.get(j, Fraction(0)) for j in range(m.cols))


class SparseEchelon:
    """Semi-reduced echelon basis for large sparse systems.

    Each stored row has coefficient 1 at its pivot, which is its
    lowest-priority key; rows are not reduced against later pivots, so
    banded inputs stay banded. Input tags are combined lazily: a row
    remembers how it was formed and :meth:`tag_of` unfolds that on demand.
    """

    def __init__(self, priority: Callable[[Hashable], object] | None = None):
        self.rows: dict[Hashable, dict] = {}
        self.priority = priority or (lambda k: k)
        self._recipe: dict[Hashable, tuple[dict, list, Fraction]] = {}
        self._order: list[Hashable] = []
        self._tags: dict[Hashable, dict] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, pivot) -> bool:
        return pivot in self.rows

    def reduce(self, vec: Mapping) -> tuple[dict, list]:
        v = {k: as_rat(c) for k, c in vec.items() if c}
        ops = []
        prio = self.priority
        rows = self.rows
        while v:
            p = min(v, key=prio)
            row = rows.get(p)
            if row is None:
                break
            c = v[p]
            _axpy(v, c, row)
            ops.append((p, c))
        return v, ops

    def add(self, vec: Mapping, tag: Mapping | None = None) -> dict | None:
        """Insert a vector; if it is dependent, return the tag relation mapping to zero."""
        v, ops = self.reduce(vec)
        tag = dict(tag or {})
        if not v:
            return self.combine(tag, ops)
        p = min(v, key=self.priority)
        inv = 1 / v[p]
        self.rows[p] = {k: c * inv for k, c in v.items()}
        self._recipe[p] = (tag, ops, inv)
        self._order.append(p)
        return None

    def combine(self, tag: Mapping, ops: list) -> dict:
        """tag - sum c * tag_of(pivot) over the reduction steps."""
        out = dict(tag)
        for p, c in ops:
            _axpy(out, c, self.tag_of(p))
        return out

    def tag_of(self, pivot) -> dict:
        if pivot not in self._tags:
            # rows only reference earlier rows, so fill in insertion order
            for p in self._order:
                if p in self._tags:
                    continue
                tag, ops, inv = self._recipe[p]
                acc = dict(tag)
                for q, c in ops:
                    _axpy(acc, c, self._tags[q])
                self._tags[p] = {k: x * inv for k, x in acc.items()}
                if p == pivot:
                    break
        return self._tags[pivot]

    def express(self, vec: Mapping) -> dict | None:
        """Tag combination equal to vec, or None if vec is outside the span."""
        v, ops = self.reduce(vec)
        if v:
            return None
        out: dict = {}
        for p, c in ops:
            _axpy(out, -c, self.tag_of(p))
        return out
