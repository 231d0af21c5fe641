"""Integer combinatorics of the rank stratification of a variety of complexes.

Everything here works on plain integer sequences: the dimension vector
d = (d_0, ..., d_n), rank vectors r = (r_1, ..., r_n) with the implicit
boundary r_0 = r_{n+1} = 0, and the homology dimensions h_i derived from
them. No linear algebra happens in this module; ``cxlin`` checks the
formulas against explicit complexes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

from stratcx.errors import (
    AdmissibilityError,
    ConsistencyError,
    ExactnessHypothesisError,
    FeasibilityError,
    ShapeError,
)

logger = logging.getLogger("stratcx.rankcomb")


@dataclass(frozen=True)
class DimVector:
    entries: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if len(self.entries) < 2:
            raise ShapeError(f"a dimension vector needs at least 2 entries, got {self.entries}")
        if any(x < 0 for x in self.entries):
            raise ShapeError(f"dimensions must be nonnegative, got {self.entries}")

    @property
    def n(self) -> int:
        """Number of maps in the complex."""
        return len(self.entries) - 1

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]


@dataclass(frozen=True, order=True)
class RankVector:
    entries: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if any(x < 0 for x in self.entries):
            raise ShapeError(f"ranks must be nonnegative, got {self.entries}")

    def padded(self) -> Tuple[int, ...]:
        """(r_0, r_1, ..., r_n, r_{n+1}) with the zero boundary ranks."""
        return (0,) + self.entries + (0,)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def is_zero(self) -> bool:
        return not any(self.entries)


@dataclass(frozen=True)
class HomologyProfile:
    h: Tuple[int, ...]   # h_0..h_n
    b: Tuple[int, ...]   # b_0..b_{n+1}, b_0 = b_{n+1} = 0
    z: Tuple[int, ...]   # z_0..z_n

    def is_exact(self) -> bool:
        return not any(self.h)


DimLike = DimVector | Sequence[int]
RankLike = RankVector | Sequence[int]


def as_dims(d: DimLike) -> DimVector:
    return d if isinstance(d, DimVector) else DimVector(tuple(d))


def as_ranks(r: RankLike) -> RankVector:
    return r if isinstance(r, RankVector) else RankVector(tuple(r))


def _context(d: DimLike, r: RankLike) -> Tuple[DimVector, RankVector]:
    dims, ranks = as_dims(d), as_ranks(r)
    if len(ranks) != dims.n:
        raise ShapeError(
            f"rank vector {ranks.entries} has length {len(ranks)}, expected {dims.n} for dims {dims.entries}"
        )
    return dims, ranks


# ---------------------------------------------------------------------------
# Euler characteristics and the homology / rank dictionary
# ---------------------------------------------------------------------------

def euler_chi(e: Sequence[int], j: int) -> int:
    """
    j-th Euler characteristic (-1)^j * sum_{i<=j} (-1)^i e_i,
    i.e. e_j - e_{j-1} + e_{j-2} - ... .
    """
    if not 0 <= j < len(e):
        raise IndexError(f"index {j} out of range for a sequence of length {len(e)}")
    total = sum((-1) ** i * int(e[i]) for i in range(j + 1))
    return (-1) ** j * total


def is_admissible(d: DimLike, r: RankLike) -> bool:
    """True iff r_{i+1} + r_i <= d_i for i = 0..n (boundary ranks are zero)."""
    dims, ranks = _context(d, r)
    padded = ranks.padded()
    return all(padded[i + 1] + padded[i] <= dims[i] for i in range(len(dims)))


def _require_admissible(dims: DimVector, ranks: RankVector) -> None:
    padded = ranks.padded()
    for i in range(len(dims)):
        if padded[i + 1] + padded[i] > dims[i]:
            raise AdmissibilityError(
                f"rank vector {ranks.entries} is not admissible for dims {dims.entries}: "
                f"r_{i + 1} + r_{i} = {padded[i + 1] + padded[i]} > d_{i} = {dims[i]}",
                index=i,
            )


def homology_from_ranks(d: DimLike, r: RankLike) -> HomologyProfile:
    """h_i = d_i - r_{i+1} - r_i, b_i = r_i, z_i = d_i - r_{i+1}."""
    dims, ranks = _context(d, r)
    _require_admissible(dims, ranks)
    padded = ranks.padded()
    h = tuple(dims[i] - padded[i + 1] - padded[i] for i in range(len(dims)))
    z = tuple(dims[i] - padded[i + 1] for i in range(len(dims)))
    return HomologyProfile(h=h, b=padded, z=z)


def homology_feasible(d: DimLike, h: Sequence[int]) -> bool:
    """Whether some complex of dimensions d has homology dimensions h."""
    try:
        ranks_from_homology(d, h)
    except FeasibilityError:
        return False
    return True


def ranks_from_homology(d: DimLike, h: Sequence[int]) -> RankVector:
    """
    Invert ``homology_from_ranks``: b_{j+1} = chi_j(d) - chi_j(h).

    A complex with homology h exists iff chi_j(h) <= chi_j(d) for j < n and
    chi_n(h) = chi_n(d); the first violated index is named in the error.
    """
    dims = as_dims(d)
    h = tuple(int(x) for x in h)
    if len(h) != len(dims):
        raise ShapeError(f"homology vector {h} has length {len(h)}, expected {len(dims)}")
    if any(x < 0 for x in h):
        raise FeasibilityError(f"homology dimensions must be nonnegative, got {h}", index=min(i for i, x in enumerate(h) if x < 0))
    n = dims.n
    for j in range(n):
        chi_h, chi_d = euler_chi(h, j), euler_chi(dims.entries, j)
        if chi_h > chi_d:
            raise FeasibilityError(
                f"infeasible homology {h} for dims {dims.entries}: chi_{j}(h) = {chi_h} > chi_{j}(d) = {chi_d}",
                index=j,
            )
    chi_h, chi_d = euler_chi(h, n), euler_chi(dims.entries, n)
    if chi_h != chi_d:
        raise FeasibilityError(
            f"infeasible homology {h} for dims {dims.entries}: chi_{n}(h) = {chi_h} != chi_{n}(d) = {chi_d}",
            index=n,
        )
    return RankVector(tuple(euler_chi(dims.entries, j) - euler_chi(h, j) for j in range(n)))


# ---------------------------------------------------------------------------
# Dimension formulas
# ---------------------------------------------------------------------------

def stratum_dim(d: DimLike, r: RankLike) -> int:
    """dim C_r = sum_i (d_i - r_i)(r_{i+1} + r_i)."""
    dims, ranks = _context(d, r)
    _require_admissible(dims, ranks)
    p = ranks.padded()
    return sum((dims[i] - p[i]) * (p[i + 1] + p[i]) for i in range(len(dims)))


def fiber_dim(d: DimLike, r: RankLike) -> int:
    """Dimension of the linear space of complexes with prescribed image flags."""
    dims, ranks = _context(d, r)
    _require_admissible(dims, ranks)
    p = ranks.padded()
    return sum((dims[i] - p[i]) * p[i + 1] for i in range(len(dims)))


def grassmannian_dim(d: DimLike, r: RankLike) -> int:
    """Dimension of the product of Grassmannians Gr(r_i, V_i)."""
    dims, ranks = _context(d, r)
    p = ranks.padded()
    return sum((dims[i] - p[i]) * p[i] for i in range(len(dims)))


def stratum_dim_variants(d: DimLike, r: RankLike) -> Dict[str, int]:
    """
    All closed forms for dim C_r. They must agree:
      - ranks:       sum (d_i - r_i)(r_{i+1} + r_i)
      - homology:    sum (d_i - r_i)(d_i - h_i)
      - squares:     1/2 sum (d_i^2 - h_i^2)
      - resolution:  fibre of the flag resolution + its Grassmannian base
    """
    dims, ranks = _context(d, r)
    prof = homology_from_ranks(dims, ranks)
    p = ranks.padded()
    twice_squares = sum(dims[i] ** 2 - prof.h[i] ** 2 for i in range(len(dims)))
    if twice_squares % 2:
        raise ArithmeticError(f"odd sum of squares {twice_squares} for dims {dims.entries}, ranks {ranks.entries}")
    return {
        "ranks": stratum_dim(dims, ranks),
        "homology": sum((dims[i] - p[i]) * (dims[i] - prof.h[i]) for i in range(len(dims))),
        "squares": twice_squares // 2,
        "resolution": fiber_dim(dims, ranks) + grassmannian_dim(dims, ranks),
    }


def tangent_dim(d: DimLike, r: RankLike) -> int:
    """Zariski tangent dimension at a complex of rank r:
    sum_i h_i (h_{i+1} + r_{i+1}) + r_i d_i."""
    dims, ranks = _context(d, r)
    h = homology_from_ranks(dims, ranks).h + (0,)
    p = ranks.padded()
    return sum(h[i] * (h[i + 1] + p[i + 1]) + p[i] * dims[i] for i in range(len(dims)))


def tangent_dim_expanded(d: DimLike, r: RankLike) -> int:
    """sum_i (d_i - r_i - r_{i+1})(d_{i+1} - r_{i+2}) + r_i d_i."""
    dims, ranks = _context(d, r)
    _require_admissible(dims, ranks)
    p = ranks.padded() + (0,)
    dd = dims.entries + (0,)
    return sum(
        (dd[i] - p[i] - p[i + 1]) * (dd[i + 1] - p[i + 2]) + p[i] * dd[i]
        for i in range(len(dims))
    )


def hom_dim(d: DimLike, r: RankLike, d2: DimLike, r2: RankLike) -> int:
    """dim Hom(f, f') = sum_i h_i (h'_i + r'_i) + r_i d'_{i-1}."""
    dims, ranks = _context(d, r)
    dims2, ranks2 = _context(d2, r2)
    if len(dims) != len(dims2):
        raise ShapeError(f"complexes have different lengths: {dims.entries} vs {dims2.entries}")
    h = homology_from_ranks(dims, ranks).h
    h2 = homology_from_ranks(dims2, ranks2).h
    p, p2 = ranks.padded(), ranks2.padded()
    total = 0
    for i in range(len(dims)):
        total += h[i] * (h2[i] + p2[i])
        if i >= 1:
            total += p[i] * dims2[i - 1]
    return total


def hom_dim_expanded(d: DimLike, r: RankLike, d2: DimLike, r2: RankLike) -> int:
    """The five-term count over the elementary summands of both complexes."""
    dims, ranks = _context(d, r)
    dims2, ranks2 = _context(d2, r2)
    if len(dims) != len(dims2):
        raise ShapeError(f"complexes have different lengths: {dims.entries} vs {dims2.entries}")
    h = homology_from_ranks(dims, ranks).h
    h2 = (0,) + homology_from_ranks(dims2, ranks2).h  # shifted so h2[i] = h'_{i-1}
    p, p2 = ranks.padded(), ranks2.padded()
    total = 0
    for i in range(len(dims)):
        total += h[i] * h2[i + 1] + h[i] * p2[i]
        total += p[i] * h2[i] + p[i] * p2[i]
        if i >= 1:
            total += p[i] * p2[i - 1]
    return total


# ---------------------------------------------------------------------------
# The poset R(d)
# ---------------------------------------------------------------------------

def enumerate_R(d: DimLike) -> List[RankVector]:
    """
    All admissible rank vectors for d in lexicographic order:
    r_1 <= d_0, r_{i+1} + r_i <= d_i (1 <= i <= n-1), r_n <= d_n.
    """
    dims = as_dims(d)
    n = dims.n
    out: List[RankVector] = []

    def extend(prefix: List[int]) -> None:
        i = len(prefix)  # choosing r_{i+1}
        if i == n:
            out.append(RankVector(tuple(prefix)))
            return
        prev = prefix[-1] if prefix else 0
        upper = dims[i] - prev
        if i + 1 == n:
            upper = min(upper, dims[n])
        for value in range(upper + 1):
            prefix.append(value)
            extend(prefix)
            prefix.pop()

    extend([])
    logger.debug("R(%s) has %d elements", dims.entries, len(out))
    return out


def poset_leq(r: RankLike, s: RankLike) -> bool:
    """Componentwise r <= s (C_r lies in the closure of C_s)."""
    a, b = as_ranks(r), as_ranks(s)
    if len(a) != len(b):
        raise ShapeError(f"rank vectors of different lengths: {a.entries} vs {b.entries}")
    return all(x <= y for x, y in zip(a, b))


def poset_meet(r: RankLike, s: RankLike) -> RankVector:
    """Componentwise minimum; the closures of C_r and C_s meet in its closure."""
    a, b = as_ranks(r), as_ranks(s)
    if len(a) != len(b):
        raise ShapeError(f"rank vectors of different lengths: {a.entries} vs {b.entries}")
    return RankVector(tuple(min(x, y) for x, y in zip(a, b)))


def _is_maximal(dims: DimVector, ranks: RankVector) -> bool:
    # R(d) is a down-set, so r is maximal iff no single coordinate can grow.
    for i in range(len(ranks)):
        bumped = list(ranks.entries)
        bumped[i] += 1
        if is_admissible(dims, bumped):
            return False
    return True


def maximal_elements(d: DimLike) -> List[RankVector]:
    """The maximal elements R^+ of R(d), in lexicographic order."""
    dims = as_dims(d)
    return [r for r in enumerate_R(dims) if _is_maximal(dims, r)]


def is_maximal(d: DimLike, r: RankLike) -> bool:
    dims, ranks = _context(d, r)
    _require_admissible(dims, ranks)
    return _is_maximal(dims, ranks)


def dominating_maximal(d: DimLike, r: RankLike) -> List[RankVector]:
    """Maximal elements r' with r <= r' (the components through C_r)."""
    dims, ranks = _context(d, r)
    _require_admissible(dims, ranks)
    return [m for m in maximal_elements(dims) if poset_leq(ranks, m)]


def poset_below(d: DimLike, r: RankLike) -> List[RankVector]:
    """Strata contained in the closure of C_r: all admissible s <= r."""
    dims, ranks = _context(d, r)
    _require_admissible(dims, ranks)
    return [s for s in enumerate_R(dims) if poset_leq(s, ranks)]


# ---------------------------------------------------------------------------
# Exact complexes
# ---------------------------------------------------------------------------

def exact_rank_vector(d: DimLike) -> RankVector:
    """
    Rank vector of the exact stratum: r_i = chi_{i-1}(d).

    Requires chi_j(d) >= 0 for 1 <= j <= n-1 and chi_n(d) = 0; the result
    satisfies r_{i+1} + r_i = d_i everywhere, so every complex in its stratum
    is exact, and it is maximal in R(d).
    """
    dims = as_dims(d)
    n = dims.n
    for j in range(1, n):
        chi = euler_chi(dims.entries, j)
        if chi < 0:
            raise ExactnessHypothesisError(
                f"no exact complex with dims {dims.entries}: chi_{j}(d) = {chi} < 0",
                index=j,
                value=chi,
            )
    chi_n = euler_chi(dims.entries, n)
    if chi_n != 0:
        raise ExactnessHypothesisError(
            f"no exact complex with dims {dims.entries}: chi_{n}(d) = {chi_n} != 0",
            index=n,
            value=chi_n,
        )
    chi = RankVector(tuple(euler_chi(dims.entries, j) for j in range(n)))
    if not _is_maximal(dims, chi):
        raise ConsistencyError(f"exact rank vector {chi.entries} is not maximal")
    return chi


def exact_stratum_dim(d: DimLike) -> int:
    """1/2 sum d_i^2, the dimension of the variety of exact complexes."""
    dims = as_dims(d)
    exact_rank_vector(dims)  # the chi hypotheses also make the sum even
    return sum(x * x for x in dims) // 2


def delta_divisors(d: DimLike) -> List[RankVector]:
    """
    [chi - e_1, ..., chi - e_n], skipping entries that would go negative
    (the corresponding locus is empty). Each closure has codimension one in
    the exact component.
    """
    dims = as_dims(d)
    chi = exact_rank_vector(dims)
    top = stratum_dim(dims, chi)
    out: List[RankVector] = []
    for i in range(len(chi)):
        if chi[i] == 0:
            continue
        lowered = list(chi.entries)
        lowered[i] -= 1
        s = RankVector(tuple(lowered))
        closure = fiber_dim(dims, s) + grassmannian_dim(dims, s)
        if top - closure != 1:
            raise ConsistencyError(f"divisor {s.entries} has codimension {top - closure}")
        out.append(s)
    return out


def exact_decomposition(d: DimLike) -> Dict[str, object]:
    """chi(d), the exact-component dimension and each divisor's codimension."""
    dims = as_dims(d)
    chi = exact_rank_vector(dims)
    top = stratum_dim(dims, chi)
    divisors = []
    for s in delta_divisors(dims):
        closure = fiber_dim(dims, s) + grassmannian_dim(dims, s)
        divisors.append({"ranks": list(s.entries), "closure_dim": closure, "codim": top - closure})
    return {
        "chi": list(chi.entries),
        "stratum_dim": top,
        "half_sum_squares": exact_stratum_dim(dims),
        "divisors": divisors,
    }
