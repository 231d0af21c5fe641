"""Exact rational matrices on top of sympy's ``DomainMatrix`` over QQ.

Small maps (the differentials of a complex, group blocks) are kept dense;
the large linear systems built by the oracles (Hom spaces, tangent spaces,
contraction maps) are assembled in the sparse dict-of-dicts format, which is
what keeps their row reduction cheap.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple

from sympy import Rational
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

Shape = Tuple[int, int]


def qq(value: Any):
    """Coerce ints, Fractions, sympy Rationals and "p/q" strings to QQ."""
    if isinstance(value, QQ.dtype):
        return value
    if isinstance(value, str):
        try:
            parsed = Rational(value.strip())
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
        if not parsed.is_Rational:
            raise ValueError(f"not an exact rational: {value!r}")
        return QQ.from_sympy(parsed)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(int(value))
    if isinstance(value, Rational):
        return QQ.from_sympy(value)
    if hasattr(value, "__index__"):
        return QQ(int(value))
    return QQ.convert(value)


def qq_str(value) -> str:
    """Exact string for a QQ element: "p" or "p/q"."""
    num, den = int(value.numerator), int(value.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def matrix(rows: Sequence[Sequence[Any]], shape: Shape | None = None) -> DomainMatrix:
    """Dense QQ matrix from nested rows; ``shape`` is required when a side is 0."""
    if shape is None:
        m = len(rows)
        n = len(rows[0]) if m else 0
        shape = (m, n)
    m, n = shape
    if m == 0 or n == 0:
        return DomainMatrix.zeros(shape, QQ)
    if len(rows) != m or any(len(row) != n for row in rows):
        raise ValueError(f"rows do not match shape {shape}")
    return DomainMatrix([[qq(x) for x in row] for row in rows], shape, QQ)


def sparse(entries: Mapping[int, Mapping[int, Any]], shape: Shape) -> DomainMatrix:
    """Sparse QQ matrix from {row: {col: value}}; zero values are dropped."""
    rows: Dict[int, Dict[int, Any]] = {}
    for i, row in entries.items():
        kept = {j: qq(v) for j, v in row.items() if v}
        if kept:
            rows[i] = kept
    return DomainMatrix(rows, shape, QQ)


def zeros(shape: Shape) -> DomainMatrix:
    return DomainMatrix.zeros(shape, QQ)


def identity(n: int) -> DomainMatrix:
    if n == 0:
        return DomainMatrix.zeros((0, 0), QQ)
    return DomainMatrix.eye(n, QQ)


def entries(M: DomainMatrix) -> List[List[Any]]:
    """Row lists of QQ elements (empty rows kept for m x 0 matrices)."""
    m, n = M.shape
    if m == 0 or n == 0:
        return [[] for _ in range(m)]
    return M.to_dense().rep.to_list()


def nonzero_entries(M: DomainMatrix) -> Dict[int, Dict[int, Any]]:
    """Sparse view {row: {col: value}} of the nonzero entries."""
    m, n = M.shape
    if m == 0 or n == 0:
        return {}
    return {i: dict(row) for i, row in M.to_sparse().rep.items() if row}


def from_strings(rows: Sequence[Sequence[str]], shape: Shape) -> DomainMatrix:
    return matrix([[qq(x) for x in row] for row in rows], shape)


def to_strings(M: DomainMatrix) -> List[List[str]]:
    return [[qq_str(x) for x in row] for row in entries(M)]


def matmul(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"cannot multiply {A.shape} by {B.shape}")
    m, n = A.shape[0], B.shape[1]
    if m == 0 or n == 0 or A.shape[1] == 0:
        return zeros((m, n))
    return A.to_dense().matmul(B.to_dense())


def add(A: DomainMatrix, B: DomainMatrix) -> DomainMatrix:
    if A.shape != B.shape:
        raise ValueError(f"cannot add {A.shape} and {B.shape}")
    if 0 in A.shape:
        return zeros(A.shape)
    return A.to_dense() + B.to_dense()


def scale(A: DomainMatrix, c: Any) -> DomainMatrix:
    if 0 in A.shape:
        return zeros(A.shape)
    return A.to_dense().scalarmul(qq(c))


def inverse(A: DomainMatrix) -> DomainMatrix:
    n, m = A.shape
    if n != m:
        raise ValueError(f"cannot invert a {A.shape} matrix")
    if n == 0:
        return zeros((0, 0))
    return A.to_dense().inv()


def det(A: DomainMatrix):
    if A.shape[0] == 0:
        return QQ(1)
    return A.to_dense().det()


def is_zero(A: DomainMatrix) -> bool:
    return not nonzero_entries(A)


def equal(A: DomainMatrix, B: DomainMatrix) -> bool:
    return A.shape == B.shape and nonzero_entries(A) == nonzero_entries(B)


def rref(M: DomainMatrix) -> Tuple[Dict[int, Dict[int, Any]], Tuple[int, ...]]:
    """Reduced row echelon form as a sparse row map, plus pivot columns."""
    m, n = M.shape
    if m == 0 or n == 0:
        return {}, ()
    reduced, pivots = M.rref()
    return nonzero_entries(reduced), tuple(pivots)


def rank(M: DomainMatrix) -> int:
    return len(rref(M)[1])


def nullspace(M: DomainMatrix) -> List[Dict[int, Any]]:
    """Kernel basis, one sparse vector {col: value} per free column.

    Each basis vector carries a 1 at its own free column and 0 at every other
    free column, so the coordinates of a kernel element in this basis are
    just its entries at the free columns.
    """
    n = M.shape[1]
    rows, pivots = rref(M)
    pivot_set = set(pivots)
    basis: List[Dict[int, Any]] = []
    for free in range(n):
        if free in pivot_set:
            continue
        vec: Dict[int, Any] = {free: QQ(1)}
        for i, p in enumerate(pivots):
            value = rows.get(i, {}).get(free)
            if value:
                vec[p] = -value
        basis.append(vec)
    return basis


def free_columns(M: DomainMatrix) -> Tuple[int, ...]:
    pivots = set(rref(M)[1])
    return tuple(j for j in range(M.shape[1]) if j not in pivots)


def column_basis(M: DomainMatrix) -> List[List[Any]]:
    """Pivot columns of M, a basis of its column space."""
    _, pivots = rref(M)
    cols = entries(M)
    return [[cols[i][j] for i in range(M.shape[0])] for j in pivots]


def columns_to_matrix(columns: Sequence[Sequence[Any]], height: int) -> DomainMatrix:
    """Matrix whose columns are the given vectors."""
    width = len(columns)
    return matrix([[columns[j][i] for j in range(width)] for i in range(height)], (height, width))


def extend_to_basis(
    columns: Sequence[Sequence[Any]],
    candidates: Iterable[Sequence[Any]],
    height: int,
) -> List[List[Any]]:
    """Greedily pick candidates that are independent of ``columns``.

    Returns only the picked candidates; the span of columns + picks is the
    span of columns + all candidates.
    """
    chosen = [list(c) for c in columns]
    picked: List[List[Any]] = []
    current = len(chosen)
    for cand in candidates:
        trial = chosen + [list(cand)]
        if rank(columns_to_matrix(trial, height)) > current:
            chosen = trial
            picked.append(list(cand))
            current += 1
    return picked
