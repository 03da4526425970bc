"""Explicit polynomial systems and their plain-text export format.

Variables are matrix entries ``x[a, j][row, col]``.  ``direction`` is ``f``
for the arrow itself and ``r`` for its reverse; the multiplicative relation
additionally uses ``fi``/``ri`` for the auxiliary inverse blocks.  Variable
order is lexicographic in ``(jet, arrow, direction, row, col)``.

Text format (UTF-8, LF)::

    quiver r=<int> arrows=[t>h,...]
    dims=[a0,a1,...]
    jetorder=<int>
    vars=<count>
    v <id> a<arrow> <dir> <row> <col> j<order>
    e <poly>

``<poly>`` is ``0`` or terms ``c`` / ``c*v<id>*v<id>...`` joined by their
signs, e.g. ``e 1*v0*v5-1*v1*v4``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .quiver import DimensionMismatchError, DomainError, Quiver, check_dims

DIRECTIONS = ("f", "r", "fi", "ri")

Monomial = tuple[int, ...]
Poly = tuple[tuple[int, Monomial], ...]


@dataclass(frozen=True)
class VarId:
    jet: int
    arrow: int
    direction: str
    row: int
    col: int

    def sort_key(self) -> tuple:
        return (self.jet, self.arrow, DIRECTIONS.index(self.direction), self.row, self.col)


@dataclass(frozen=True)
class PolySystem:
    quiver: Quiver
    dims: tuple[int, ...]
    jet_order: int
    variables: tuple[VarId, ...]
    equations: tuple[Poly, ...]

    def var_index(self) -> dict[VarId, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def degree(self, k: int) -> int:
        return max((len(mono) for _, mono in self.equations[k]), default=0)

    def evaluate(self, values: np.ndarray, p: int) -> np.ndarray:
        """Residues of all equations at a batch of points, shape ``(batch, eqs)``."""
        values = np.asarray(values, dtype=np.int64) % p
        out = np.zeros((values.shape[0], len(self.equations)), dtype=np.int64)
        for k, poly in enumerate(self.equations):
            acc = np.zeros(values.shape[0], dtype=np.int64)
            for coef, mono in poly:
                term = np.full(values.shape[0], coef % p, dtype=np.int64)
                for v in mono:
                    term = term * values[:, v] % p
                acc = (acc + term) % p
            out[:, k] = acc
        return out


class _PolyBuilder:
    """Sparse polynomial as ``{sorted monomial: coefficient}``."""

    def __init__(self, terms: dict[Monomial, int] | None = None) -> None:
        self.terms = dict(terms or {})

    @classmethod
    def const(cls, c: int) -> "_PolyBuilder":
        return cls({(): c} if c else {})

    @classmethod
    def var(cls, v: int) -> "_PolyBuilder":
        return cls({(v,): 1})

    def add(self, other: "_PolyBuilder", sign: int = 1) -> "_PolyBuilder":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, 0) + sign * c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return _PolyBuilder(out)

    def mul(self, other: "_PolyBuilder") -> "_PolyBuilder":
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(sorted(m1 + m2))
                s = out.get(mono, 0) + c1 * c2
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        return _PolyBuilder(out)

    def freeze(self) -> Poly:
        return tuple((c, mono) for mono, c in sorted(self.terms.items()))


def _matrix_shape(q: Quiver, dims: Sequence[int], arrow: int, direction: str) -> tuple[int, int]:
    t, h = q.arrows[arrow]
    if direction in ("f", "ri"):
        return dims[h], dims[t]
    return dims[t], dims[h]


def _variables(q: Quiver, dims: Sequence[int], m: int, directions=("f", "r")) -> list[VarId]:
    out = []
    for j in range(m + 1):
        for a in range(len(q.arrows)):
            for d in directions:
                rows, cols = _matrix_shape(q, dims, a, d)
                out.extend(VarId(j, a, d, r, c) for r in range(rows) for c in range(cols))
    return out


def _matmul_entry(x, y, r: int, c: int, inner: int) -> _PolyBuilder:
    acc = _PolyBuilder()
    for l in range(inner):
        acc = acc.add(x(r, l).mul(y(l, c)))
    return acc


def jet_system(q: Quiver, dims: Sequence[int], m: int) -> PolySystem:
    """Truncated arc equations of the moment map up to ``t^m``.

    Order ``k`` at vertex ``i``:
    ``sum_a sum_j x_{a,j} x_{a*,k-j}`` over arrows into ``i`` minus
    ``x_{a*,k-j} x_{a,j}`` over arrows out of ``i``.
    """
    if m < 0:
        raise DomainError("jet order must be >= 0")
    dims = check_dims(q, dims)
    variables = _variables(q, dims, m)
    index = {v: i for i, v in enumerate(variables)}

    def entry(a: int, d: str, j: int):
        return lambda r, c: _PolyBuilder.var(index[VarId(j, a, d, r, c)])

    equations = []
    for k in range(m + 1):
        for i in range(q.vertex_count):
            for r, c in itertools.product(range(dims[i]), repeat=2):
                acc = _PolyBuilder()
                for a, (t, h) in enumerate(q.arrows):
                    for j in range(k + 1):
                        x, y = entry(a, "f", j), entry(a, "r", k - j)
                        if h == i:
                            acc = acc.add(_matmul_entry(x, y, r, c, dims[t]))
                        if t == i:
                            acc = acc.add(_matmul_entry(y, x, r, c, dims[h]), -1)
                equations.append(acc.freeze())
    return PolySystem(q, dims, m, tuple(variables), tuple(equations))


def moment_system(q: Quiver, dims: Sequence[int]) -> PolySystem:
    return jet_system(q, dims, 0)


def _determinant(entry, n: int) -> _PolyBuilder:
    acc = _PolyBuilder()
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = _PolyBuilder.const(sign)
        for r in range(n):
            term = term.mul(entry(r, perm[r]))
        acc = acc.add(term)
    return acc


def multiplicative_system(
    g: int, n: int, variant: str = "SL", rhs: Sequence[Sequence[int]] | None = None
) -> PolySystem:
    """``prod_i x_i y_i x_i^{-1} y_i^{-1} = rhs`` with explicit inverse blocks."""
    if variant not in ("GL", "SL"):
        raise DomainError(f"unknown variant {variant!r}")
    if g < 1 or n < 1:
        raise DomainError("need g >= 1 and n >= 1")
    if rhs is None:
        rhs = [[int(r == c) for c in range(n)] for r in range(n)]
    rhs = [list(map(int, row)) for row in rhs]
    if len(rhs) != n or any(len(row) != n for row in rhs):
        raise DimensionMismatchError(f"rhs must be {n}x{n}")
    q = Quiver.loops(g)
    variables = _variables(q, (n,), 0, DIRECTIONS)
    index = {v: i for i, v in enumerate(variables)}

    def mat(a: int, d: str):
        return lambda r, c: _PolyBuilder.var(index[VarId(0, a, d, r, c)])

    def ident(r, c):
        return _PolyBuilder.const(int(r == c))

    equations: list[Poly] = []
    for a in range(g):
        for d, di in (("f", "fi"), ("r", "ri")):
            for left, right in ((mat(a, d), mat(a, di)), (mat(a, di), mat(a, d))):
                for r, c in itertools.product(range(n), repeat=2):
                    equations.append(_matmul_entry(left, right, r, c, n).add(ident(r, c), -1).freeze())
    if variant == "SL":
        for a in range(g):
            for d in ("f", "r"):
                equations.append(_determinant(mat(a, d), n).add(_PolyBuilder.const(1), -1).freeze())
    factors = []
    for a in range(g):
        factors.extend([mat(a, "f"), mat(a, "r"), mat(a, "fi"), mat(a, "ri")])
    prod = [[factors[0](r, c) for c in range(n)] for r in range(n)]
    for f in factors[1:]:
        prod = [
            [_matmul_entry(lambda i, l: prod[i][l], f, r, c, n) for c in range(n)]
            for r in range(n)
        ]
    for r, c in itertools.product(range(n), repeat=2):
        equations.append(prod[r][c].add(_PolyBuilder.const(rhs[r][c]), -1).freeze())
    return PolySystem(q, (n,), 0, tuple(variables), tuple(equations))


def _format_poly(poly: Poly) -> str:
    if not poly:
        return "0"
    parts = []
    for k, (coef, mono) in enumerate(poly):
        term = str(coef) + "".join(f"*v{v}" for v in mono)
        if k and coef >= 0:
            term = "+" + term
        parts.append(term)
    return "".join(parts)


def format_system(ps: PolySystem) -> str:
    arrows = ",".join(f"{t}>{h}" for t, h in ps.quiver.arrows)
    lines = [
        f"quiver r={ps.quiver.vertex_count} arrows=[{arrows}]",
        "dims=[" + ",".join(map(str, ps.dims)) + "]",
        f"jetorder={ps.jet_order}",
        f"vars={len(ps.variables)}",
    ]
    for i, v in enumerate(ps.variables):
        lines.append(f"v {i} a{v.arrow} {v.direction} {v.row} {v.col} j{v.jet}")
    for poly in ps.equations:
        lines.append("e " + _format_poly(poly))
    return "\n".join(lines) + "\n"


def export_system(ps: PolySystem, path: str | Path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_system(ps))
    return path


class FormatError(ValueError):
    pass


_TERM = re.compile(r"[+-]?[^+-]+")


def _parse_poly(text: str) -> Poly:
    if text == "0":
        return ()
    terms = []
    for chunk in _TERM.findall(text):
        head, *vars_ = chunk.split("*")
        try:
            coef = int(head)
            mono = tuple(int(v[1:]) for v in vars_)
        except ValueError as exc:
            raise FormatError(f"bad term {chunk!r}") from exc
        terms.append((coef, mono))
    return tuple(terms)


def _parse_list(text: str, prefix: str) -> str:
    if not text.startswith(prefix + "[") or not text.endswith("]"):
        raise FormatError(f"expected {prefix}[...], got {text!r}")
    return text[len(prefix) + 1 : -1]


def parse_system(text: str) -> PolySystem:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    try:
        head, r_field, a_field = lines[0].split(" ")
        if head != "quiver":
            raise FormatError("missing quiver header")
        r = int(r_field.removeprefix("r="))
        body = _parse_list(a_field, "arrows=")
        arrows = tuple(tuple(map(int, a.split(">"))) for a in body.split(",")) if body else ()
        dims = tuple(map(int, filter(None, _parse_list(lines[1], "dims=").split(","))))
        jet = int(lines[2].removeprefix("jetorder="))
        nvars = int(lines[3].removeprefix("vars="))
    except (IndexError, ValueError) as exc:
        raise FormatError(f"bad header: {exc}") from exc
    variables = []
    equations = []
    for line in lines[4:]:
        tag, _, rest = line.partition(" ")
        if tag == "v":
            try:
                vid, arrow, d, row, col, j = rest.split(" ")
                var = VarId(int(j[1:]), int(arrow[1:]), d, int(row), int(col))
            except ValueError as exc:
                raise FormatError(f"bad variable line {line!r}") from exc
            if int(vid) != len(variables):
                raise FormatError(f"variable ids out of order at {line!r}")
            if d not in DIRECTIONS:
                raise FormatError(f"unknown direction {d!r}")
            variables.append(var)
        elif tag == "e":
            equations.append(_parse_poly(rest))
        else:
            raise FormatError(f"unknown line {line!r}")
    if len(variables) != nvars:
        raise FormatError(f"header declares {nvars} variables, found {len(variables)}")
    if any(v >= nvars for poly in equations for _, mono in poly for v in mono):
        raise FormatError("equation references an undeclared variable")
    try:
        quiver = Quiver(r, arrows)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return PolySystem(quiver, dims, jet, tuple(variables), tuple(equations))


def read_system(path: str | Path) -> PolySystem:
    return parse_system(Path(path).read_text(encoding="utf-8"))


def trace_polys(ps: PolySystem) -> list[Poly]:
    """Per jet order, the sum over vertices of the traces of the equations."""
    per_order = sum(d * d for d in ps.dims)
    out = []
    for k in range(ps.jet_order + 1):
        acc = _PolyBuilder()
        idx = k * per_order
        for d in ps.dims:
            for r in range(d):
                for c in range(d):
                    if r == c:
                        acc = acc.add(_PolyBuilder(dict((m, cf) for cf, m in ps.equations[idx])))
                    idx += 1
        out.append(acc.freeze())
    return out


def iter_terms(ps: PolySystem) -> Iterable[tuple[int, int, Monomial]]:
    for k, poly in enumerate(ps.equations):
        for coef, mono in poly:
            yield k, coef, mono
