"""Explicit complexes of rational matrices.

Convention used everywhere (JSON included): the map f_i: V_{i-1} -> V_i is
stored as a matrix M_i with d_i rows and d_{i-1} columns acting on
coordinate columns, so composition is the matrix product M_{i+1} M_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from sympy.polys.matrices import DomainMatrix

from stratcx import linalg
from stratcx.config import settings
from stratcx.errors import (
    ConsistencyError,
    GroupElementError,
    NotAComplexError,
    ShapeError,
    WitnessError,
)
from stratcx.rankcomb import (
    DimVector,
    HomologyProfile,
    RankLike,
    RankVector,
    as_dims,
    as_ranks,
    homology_from_ranks,
    is_admissible,
)

logger = logging.getLogger("stratcx.cxlin")


@dataclass(frozen=True, eq=False)
class ComplexInstance:
    dims: Tuple[int, ...]
    maps: Tuple[DomainMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.dims:
            raise ShapeError("a complex needs at least one space")
        if len(self.maps) != len(self.dims) - 1:
            raise ShapeError(f"{len(self.dims)} spaces need {len(self.dims) - 1} maps, got {len(self.maps)}")
        for i, M in enumerate(self.maps, start=1):
            expected = (self.dims[i], self.dims[i - 1])
            if tuple(M.shape) != expected:
                raise ShapeError(f"M_{i} has shape {tuple(M.shape)}, expected {expected}")

    @property
    def n(self) -> int:
        return len(self.maps)

    @property
    def dim_vector(self) -> DimVector:
        return DimVector(self.dims)

    def map(self, i: int) -> DomainMatrix:
        """M_i for 1 <= i <= n."""
        return self.maps[i - 1]

    def extend_zero(self) -> "ComplexInstance":
        """Append a zero space on top (one more map, of shape 0 x d_n)."""
        return ComplexInstance(self.dims + (0,), self.maps + (linalg.zeros((0, self.dims[-1])),))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ComplexInstance):
            return NotImplemented
        return self.dims == other.dims and all(
            linalg.equal(a, b) for a, b in zip(self.maps, other.maps)
        )

    def __repr__(self) -> str:
        return f"ComplexInstance(dims={self.dims}, maps={[linalg.to_strings(M) for M in self.maps]})"


@dataclass(frozen=True, eq=False)
class GroupElement:
    blocks: Tuple[DomainMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for i, g in enumerate(self.blocks):
            rows, cols = g.shape
            if rows != cols:
                raise ShapeError(f"g_{i} must be square, got {tuple(g.shape)}")
            if linalg.det(g) == 0:
                raise GroupElementError(f"g_{i} is not invertible")

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "GroupElement":
        return cls(tuple(linalg.identity(d) for d in dims))

    def inverse(self) -> "GroupElement":
        return GroupElement(tuple(linalg.inverse(g) for g in self.blocks))

    def compose(self, other: "GroupElement") -> "GroupElement":
        """(self * other)_i = self_i other_i."""
        if len(self.blocks) != len(other.blocks):
            raise ShapeError("group elements of different lengths")
        return GroupElement(tuple(linalg.matmul(a, b) for a, b in zip(self.blocks, other.blocks)))


@dataclass(frozen=True, eq=False)
class ComplexDecomposition:
    """
    V_i = B_i + Hbar_i + Bbar_i, one basis per summand (vectors as columns).

    ``boundary[i]`` spans B_i(f) = im f_i and is chosen as f_i(Bbar_{i-1})
    so that f_i is the identity between the two chosen bases.
    """

    dims: Tuple[int, ...]
    boundary: Tuple[Tuple[Tuple[Any, ...], ...], ...]
    homology: Tuple[Tuple[Tuple[Any, ...], ...], ...]
    coboundary: Tuple[Tuple[Tuple[Any, ...], ...], ...]

    def summand_dims(self) -> Dict[str, List[int]]:
        return {
            "boundary": [len(x) for x in self.boundary],
            "homology": [len(x) for x in self.homology],
            "coboundary": [len(x) for x in self.coboundary],
        }

    def ranks(self) -> RankVector:
        return RankVector(tuple(len(x) for x in self.boundary[1:]))

    def change_of_basis(self) -> GroupElement:
        """g_i = [B_i | Hbar_i | Bbar_i] as columns."""
        blocks = []
        for i, d in enumerate(self.dims):
            cols = list(self.boundary[i]) + list(self.homology[i]) + list(self.coboundary[i])
            blocks.append(linalg.columns_to_matrix(cols, d))
        return GroupElement(tuple(blocks))

    def normal_form(self) -> ComplexInstance:
        return normal_form(self.dims, self.ranks())

    def reassemble(self) -> ComplexInstance:
        """Conjugate the block-normal complex back by the change of basis."""
        return group_act(self.change_of_basis(), self.normal_form())


# ---------------------------------------------------------------------------
# Construction and measurement
# ---------------------------------------------------------------------------

def zero_complex(dims: Sequence[int]) -> ComplexInstance:
    dims = tuple(int(x) for x in dims)
    return ComplexInstance(dims, tuple(linalg.zeros((dims[i], dims[i - 1])) for i in range(1, len(dims))))


def from_rows(dims: Sequence[int], maps: Sequence[Sequence[Sequence[Any]]]) -> ComplexInstance:
    """Build a complex from nested rows (ints, Fractions or "p/q" strings)."""
    dims = tuple(int(x) for x in dims)
    if len(maps) != len(dims) - 1:
        raise ShapeError(f"{len(dims)} spaces need {len(dims) - 1} maps, got {len(maps)}")
    return ComplexInstance(
        dims,
        tuple(linalg.matrix(rows, (dims[i], dims[i - 1])) for i, rows in enumerate(maps, start=1)),
    )


def _failing_stage(c: ComplexInstance) -> int | None:
    for i in range(1, c.n):
        if not linalg.is_zero(linalg.matmul(c.map(i + 1), c.map(i))):
            return i
    return None


def verify_complex(c: ComplexInstance) -> bool:
    """True iff M_{i+1} M_i = 0 for i = 1..n-1, exactly."""
    return _failing_stage(c) is None


def _require_complex(c: ComplexInstance) -> None:
    stage = _failing_stage(c)
    if stage is not None:
        raise NotAComplexError(f"M_{stage + 1} M_{stage} != 0", stage=stage)


def ranks(c: ComplexInstance) -> RankVector:
    _require_complex(c)
    return RankVector(tuple(linalg.rank(M) for M in c.maps))


def homology(c: ComplexInstance) -> HomologyProfile:
    """h_i = dim ker f_{i+1} - rank f_i, measured by row reduction."""
    r = ranks(c)
    p = r.padded()
    kernels = [len(linalg.nullspace(c.map(i + 1))) for i in range(c.n)] + [c.dims[-1]]
    h = tuple(kernels[i] - p[i] for i in range(len(c.dims)))
    profile = homology_from_ranks(c.dims, r)
    if profile.h != h:
        raise ConsistencyError(f"measured homology {h} disagrees with rank formula {profile.h}")
    return profile


def closure_membership(c: ComplexInstance, r: RankLike) -> bool:
    """Whether c lies in the closure of C_r, i.e. rank M_i <= r_i for all i."""
    bound = as_ranks(r)
    if len(bound) != c.n:
        raise ShapeError(f"rank vector of length {len(bound)} for a complex with {c.n} maps")
    return all(x <= y for x, y in zip(ranks(c), bound))


def _random_invertible(rng: np.random.Generator, size: int) -> DomainMatrix:
    bound = settings.WITNESS_ENTRY_BOUND
    for attempt in range(settings.WITNESS_MAX_RETRIES):
        rows = rng.integers(-bound, bound + 1, size=(size, size)).tolist()
        M = linalg.matrix(rows, (size, size))
        if linalg.det(M) != 0:
            if attempt:
                logger.debug(f"invertible {size}x{size} block after {attempt + 1} draws")
            return M
    raise WitnessError(
        f"no invertible {size}x{size} block after {settings.WITNESS_MAX_RETRIES} draws"
    )


def normal_form(dims: Sequence[int], r: RankLike) -> ComplexInstance:
    """
    The block-normal complex of rank r: in V_i the first r_i basis vectors span
    B_i, the next h_i span a homology complement and the last r_{i+1} are sent
    by f_{i+1} to the basis of B_{i+1}.
    """
    dims = tuple(int(x) for x in dims)
    target = as_ranks(r)
    if not is_admissible(dims, target):
        homology_from_ranks(dims, target)  # raises with the offending index
    p = target.padded()
    maps = []
    for i in range(1, len(dims)):
        offset = dims[i - 1] - p[i]
        entries = {row: {offset + row: 1} for row in range(p[i])}
        maps.append(linalg.sparse(entries, (dims[i], dims[i - 1])).to_dense())
    return ComplexInstance(dims, tuple(maps))


def construct_with_ranks(d: Sequence[int], r: RankLike, seed: int) -> ComplexInstance:
    """
    Seeded witness of rank exactly r.

    Each V_i gets a random basis P_i whose first r_i columns span B_i and whose
    first r_i + h_i columns span Z_i; f_i is a random isomorphism from the last
    r_i columns of P_{i-1} onto B_i, zero on Z_{i-1}.
    """
    dims = as_dims(d)
    target = as_ranks(r)
    homology_from_ranks(dims, target)  # admissibility, with a precise error
    rng = np.random.default_rng(seed)
    bases = [_random_invertible(rng, x) for x in dims]
    normal = normal_form(dims.entries, target)
    sigmas = [_random_invertible(rng, x) for x in target]
    maps = []
    for i in range(1, len(dims)):
        # widen sigma_i into the d_i x d_i block acting on the first r_i rows
        rows = linalg.entries(linalg.identity(dims[i]))
        sig = linalg.entries(sigmas[i - 1])
        for a in range(target[i - 1]):
            for b in range(target[i - 1]):
                rows[a][b] = sig[a][b]
        widened = linalg.matrix(rows, (dims[i], dims[i]))
        core = linalg.matmul(widened, normal.map(i))
        M = linalg.matmul(linalg.matmul(bases[i], core), linalg.inverse(bases[i - 1]))
        maps.append(M)
    c = ComplexInstance(dims.entries, tuple(maps))
    if not verify_complex(c):
        raise WitnessError("witness is not a complex")
    found = ranks(c)
    if found != target:
        raise WitnessError(f"witness has ranks {found.entries}, wanted {target.entries}")
    return c


def group_act(g: GroupElement, c: ComplexInstance) -> ComplexInstance:
    """(g . f)_i = g_i M_i g_{i-1}^{-1}."""
    if len(g.blocks) != len(c.dims):
        raise ShapeError(f"group element has {len(g.blocks)} blocks, complex has {len(c.dims)} spaces")
    for i, (block, d) in enumerate(zip(g.blocks, c.dims)):
        if block.shape[0] != d:
            raise ShapeError(f"g_{i} has size {block.shape[0]}, expected {d}")
    inverses = [linalg.inverse(b) for b in g.blocks]
    maps = tuple(
        linalg.matmul(linalg.matmul(g.blocks[i], c.map(i)), inverses[i - 1])
        for i in range(1, len(c.dims))
    )
    return ComplexInstance(c.dims, maps)


def random_group_element(dims: Sequence[int], seed: int) -> GroupElement:
    rng = np.random.default_rng(seed)
    return GroupElement(tuple(_random_invertible(rng, int(x)) for x in dims))


# ---------------------------------------------------------------------------
# Splitting into elementary complexes
# ---------------------------------------------------------------------------

def _standard_basis(d: int) -> List[List[Any]]:
    return linalg.entries(linalg.identity(d)) if d else []


def split(c: ComplexInstance) -> ComplexDecomposition:
    """
    Choose complements V_i = Z_i + Bbar_i and Z_i = B_i + Hbar_i, and take
    f_{i+1}(Bbar_i) as the basis of B_{i+1}.
    """
    _require_complex(c)
    n = c.n
    coboundary: List[List[List[Any]]] = []
    boundary: List[List[List[Any]]] = [[]]
    homology_basis: List[List[List[Any]]] = []

    # Bbar_i: complement of Z_i = ker M_{i+1} in V_i
    for i, d in enumerate(c.dims):
        if i == n:
            coboundary.append([])
            continue
        kernel = linalg.nullspace(c.map(i + 1))
        kernel_cols = [[vec.get(j, 0) for j in range(d)] for vec in kernel]
        coboundary.append(linalg.extend_to_basis(kernel_cols, _standard_basis(d), d))

    for i in range(1, n + 1):
        source = linalg.columns_to_matrix(coboundary[i - 1], c.dims[i - 1])
        image = linalg.matmul(c.map(i), source)
        cols = linalg.entries(image)
        boundary.append([[cols[a][b] for a in range(c.dims[i])] for b in range(len(coboundary[i - 1]))])

    for i, d in enumerate(c.dims):
        if i < n:
            kernel = linalg.nullspace(c.map(i + 1))
            kernel_cols = [[vec.get(j, 0) for j in range(d)] for vec in kernel]
        else:
            kernel_cols = _standard_basis(d)
        homology_basis.append(linalg.extend_to_basis(boundary[i], kernel_cols, d))

    def freeze(blocks: List[List[List[Any]]]) -> Tuple[Tuple[Tuple[Any, ...], ...], ...]:
        return tuple(tuple(tuple(linalg.qq(x) for x in col) for col in block) for block in blocks)

    dec = ComplexDecomposition(
        dims=c.dims,
        boundary=freeze(boundary),
        homology=freeze(homology_basis),
        coboundary=freeze(coboundary),
    )
    logger.debug(f"split dims={c.dims} summands={dec.summand_dims()}")
    return dec


def orbit_witness(c: ComplexInstance, c2: ComplexInstance) -> GroupElement:
    """g with g . c = c2, for two complexes in the same stratum."""
    if c.dims != c2.dims:
        raise ShapeError(f"complexes live on different spaces: {c.dims} vs {c2.dims}")
    if ranks(c) != ranks(c2):
        raise ShapeError(f"different strata: {ranks(c).entries} vs {ranks(c2).entries}")
    p = split(c).change_of_basis()
    p2 = split(c2).change_of_basis()
    return p2.compose(p.inverse())


# ---------------------------------------------------------------------------
# Morphisms, shift and tangent spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MorphismSpace:
    dim: int
    basis: Tuple[Tuple[DomainMatrix, ...], ...]


def _offsets(shapes: Sequence[Tuple[int, int]]) -> List[int]:
    out, total = [], 0
    for rows, cols in shapes:
        out.append(total)
        total += rows * cols
    out.append(total)
    return out


def _unpack(vec: Dict[int, Any], shapes: Sequence[Tuple[int, int]], offsets: Sequence[int]) -> Tuple[DomainMatrix, ...]:
    blocks = []
    for (rows, cols), start in zip(shapes, offsets):
        entries = {}
        for a in range(rows):
            for b in range(cols):
                value = vec.get(start + a * cols + b)
                if value:
                    entries.setdefault(a, {})[b] = value
        blocks.append(linalg.sparse(entries, (rows, cols)).to_dense())
    return tuple(blocks)


def hom_space(c: ComplexInstance, c2: ComplexInstance, with_basis: bool = False) -> MorphismSpace:
    """
    Morphisms of complexes g = (g_0..g_n), g_i: V_i -> V'_i, with
    g_i M_i = M'_i g_{i-1} for i = 1..n, as the kernel of one sparse system.
    """
    if c.n != c2.n:
        raise ShapeError(f"complexes of different lengths: {c.n} vs {c2.n}")
    shapes = [(c2.dims[i], c.dims[i]) for i in range(len(c.dims))]
    offsets = _offsets(shapes)
    unknowns = offsets[-1]
    system: Dict[int, Dict[int, Any]] = {}
    row = 0
    for i in range(1, c.n + 1):
        M = linalg.entries(c.map(i))        # d_i x d_{i-1}
        M2 = linalg.entries(c2.map(i))      # d'_i x d'_{i-1}
        di, dprev = c.dims[i], c.dims[i - 1]
        d2i, d2prev = c2.dims[i], c2.dims[i - 1]
        for a in range(d2i):
            for col in range(dprev):
                eq: Dict[int, Any] = {}
                # (g_i M_i)[a, col]
                for b in range(di):
                    if M[b][col]:
                        key = offsets[i] + a * di + b
                        eq[key] = eq.get(key, 0) + M[b][col]
                # -(M'_i g_{i-1})[a, col]
                for b in range(d2prev):
                    if M2[a][b]:
                        key = offsets[i - 1] + b * dprev + col
                        eq[key] = eq.get(key, 0) - M2[a][b]
                eq = {k: v for k, v in eq.items() if v}
                if eq:
                    system[row] = eq
                row += 1
    A = linalg.sparse(system, (max(row, 1), unknowns))
    if with_basis:
        kernel = linalg.nullspace(A) if unknowns else []
        basis = tuple(_unpack(vec, shapes, offsets) for vec in kernel)
        return MorphismSpace(dim=len(kernel), basis=basis)
    dim = unknowns - (linalg.rank(A) if unknowns else 0)
    logger.debug(f"hom space {c.dims} -> {c2.dims}: {unknowns} unknowns, {row} equations, dim {dim}")
    return MorphismSpace(dim=dim, basis=())


def is_morphism(c: ComplexInstance, c2: ComplexInstance, g: Sequence[DomainMatrix]) -> bool:
    return all(
        linalg.equal(linalg.matmul(g[i], c.map(i)), linalg.matmul(c2.map(i), g[i - 1]))
        for i in range(1, c.n + 1)
    )


def shift(c: ComplexInstance) -> ComplexInstance:
    """f(1): spaces (d_1..d_n), stored map j is (-1)^j M_{j+1}."""
    _require_complex(c)
    maps = tuple(linalg.scale(c.map(j + 1), (-1) ** j) for j in range(1, c.n))
    return ComplexInstance(c.dims[1:], maps)


def tangent_space(c: ComplexInstance) -> int:
    """
    Zariski tangent dimension at c: solutions (g_1..g_n), g_i of shape
    d_i x d_{i-1}, of M_{i+1} g_i + g_{i+1} M_i = 0 for i = 1..n-1.
    """
    _require_complex(c)
    shapes = [(c.dims[i], c.dims[i - 1]) for i in range(1, len(c.dims))]
    offsets = _offsets(shapes)
    unknowns = offsets[-1]
    if unknowns == 0:
        return 0
    system: Dict[int, Dict[int, Any]] = {}
    row = 0
    for i in range(1, c.n):
        nxt = linalg.entries(c.map(i + 1))   # d_{i+1} x d_i
        cur = linalg.entries(c.map(i))       # d_i x d_{i-1}
        di, dprev, dnext = c.dims[i], c.dims[i - 1], c.dims[i + 1]
        gi, gnext = offsets[i - 1], offsets[i]
        for a in range(dnext):
            for col in range(dprev):
                eq: Dict[int, Any] = {}
                # (M_{i+1} g_i)[a, col]
                for b in range(di):
                    if nxt[a][b]:
                        key = gi + b * dprev + col
                        eq[key] = eq.get(key, 0) + nxt[a][b]
                # (g_{i+1} M_i)[a, col]
                for b in range(di):
                    if cur[b][col]:
                        key = gnext + a * di + b
                        eq[key] = eq.get(key, 0) + cur[b][col]
                eq = {k: v for k, v in eq.items() if v}
                if eq:
                    system[row] = eq
                row += 1
    if not system:
        return unknowns
    A = linalg.sparse(system, (row, unknowns))
    return unknowns - linalg.rank(A)


def tangent_space_via_hom(c: ComplexInstance) -> int:
    """dim Hom(f, f(1)), with f(1) padded by a zero top space."""
    return hom_space(c, shift(c).extend_zero()).dim
