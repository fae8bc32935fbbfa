"""Squared-Hilbert-distance kernels from combings and actions.

The central object is a symmetric kernel K(x, y) = ||f(x) - f(y)||^2 indexed
by a Cayley ball, where f comes from a combing (K(x,y) = ||q[e,x]-q[e,y]||_1,
realized explicitly by a slot embedding of integer chains into a Hilbert
space), from an isometric tree action, or from user-supplied data.  Kernel
values from combings are half-integers; they are stored exactly as doubled
integers alongside a float view, so equality checks and displacement excesses
stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .bicombing import BicombingSpec, Chain1, Edge, area, combing_chain
from .groups import CayleyBall, OutOfBallError

HARD_CND_FLOOR = -1e-6
CND_TOLERANCE = -1e-9

PROVENANCES = ("bicombing", "tree_action", "user_supplied")


class NonIntegralChainError(ValueError):
    """The slot embedding is defined on integer chains only."""


class DecompositionError(AssertionError):
    """A pairwise displacement excess exceeded its two-triangle bound."""


@dataclass
class DisplacementKernel:
    """Dense symmetric kernel over (a radius prefix of) a Cayley ball.

    ``twice`` holds the exact doubled values as integers whenever the
    provenance guarantees half-integer entries; ``values`` is the float64
    view (exact for these dyadic magnitudes).  ``displacement_constant`` is
    the two-sided empirical displacement bound for the recorded scan split,
    or a declared constant.
    """

    ball: CayleyBall
    values: np.ndarray
    twice: np.ndarray | None
    provenance: str
    displacement_constant: float
    radius: int
    bicombing: BicombingSpec | None = None
    scan_info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def index_of(self, word: str) -> int:
        idx = self.ball.canonical_index(word)
        if idx is None or idx >= self.n:
            raise OutOfBallError(f"{word!r} is outside the kernel's ball")
        return idx

    def value(self, i: int, j: int) -> float:
        return float(self.values[i, j])

    def exact(self, i: int, j: int) -> Fraction:
        if self.twice is not None:
            return Fraction(int(self.twice[i, j]), 2)
        return Fraction(self.values[i, j])


def kernel_dump(kernel: DisplacementKernel) -> str:
    """Kernel CSV: header ``i,j,K`` and one row per pair i <= j, indices in
    ball ordering; exact values render as fractions when available."""
    lines = ["i,j,K"]
    for i in range(kernel.n):
        for j in range(i, kernel.n):
            if kernel.twice is not None:
                val = str(Fraction(int(kernel.twice[i, j]), 2))
            else:
                val = repr(float(kernel.values[i, j]))
            lines.append(f"{i},{j},{val}")
    return "\n".join(lines) + "\n"


# -- slot embedding ----------------------------------------------------------


class FeatureVector:
    """Explicit +-1 coordinates realizing the l1-to-squared-Hilbert embedding
    on integer chains: edge value a > 0 fills slots 1..a with +1, a < 0 fills
    slots a+1..0 with -1.  Inner products are integer-exact."""

    __slots__ = ("slots",)

    def __init__(self, slots: dict[tuple[Edge, int], int]):
        self.slots = slots

    def dot(self, other: "FeatureVector") -> int:
        a, b = self.slots, other.slots
        if len(b) < len(a):
            a, b = b, a
        return sum(v * b.get(k, 0) for k, v in a.items())

    def norm_sq(self) -> int:
        return len(self.slots)

    def squared_distance(self, other: "FeatureVector") -> int:
        # signed slots never collide with opposite signs, so the squared
        # distance is the symmetric difference size
        return self.norm_sq() + other.norm_sq() - 2 * self.dot(other)


def feature_embed(chain: Chain1) -> FeatureVector:
    slots: dict[tuple[Edge, int], int] = {}
    for edge, c in chain.coeffs.items():
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise NonIntegralChainError(
                    f"coefficient {c} on edge {edge} is not an integer"
                )
            c = c.numerator
        if c > 0:
            for k in range(1, c + 1):
                slots[(edge, k)] = 1
        else:
            for k in range(c + 1, 1):
                slots[(edge, k)] = -1
    return FeatureVector(slots)


# -- kernel construction -----------------------------------------------------


def _doubled_chain(spec: BicombingSpec, x: str) -> dict[Edge, int]:
    chain = combing_chain(spec, "", x)
    out: dict[Edge, int] = {}
    for edge, c in chain.coeffs.items():
        c2 = 2 * c
        if isinstance(c2, Fraction):
            if c2.denominator != 1:
                raise NonIntegralChainError(
                    f"doubled coefficient {c2} on edge {edge} is not an integer"
                )
            c2 = c2.numerator
        out[edge] = c2
    return out


def _pairwise_l1_loop(chains2: list[dict[Edge, int]]) -> np.ndarray:
    n = len(chains2)
    l2 = [sum(abs(c) for c in ch.values()) for ch in chains2]
    K2 = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        di = chains2[i]
        l2i = l2[i]
        for j in range(i + 1, n):
            dj = chains2[j]
            small, big = (di, dj) if len(di) <= len(dj) else (dj, di)
            s = 0
            for t, c in small.items():
                d = big.get(t)
                if d is not None and (c > 0) == (d > 0):
                    s += min(abs(c), abs(d))
            v = l2i + l2[j] - 2 * s
            K2[i, j] = v
            K2[j, i] = v
    return K2


def _pairwise_l1_sparse(chains2: list[dict[Edge, int]]) -> np.ndarray:
    # |x - y| = |x| + |y| - 2 * samesign-min(x, y); the samesign-min Gram
    # matrix splits into indicator layers for |coefficients| <= 2
    import scipy.sparse as sp

    n = len(chains2)
    edge_ids: dict[Edge, int] = {}
    rows: list[int] = []
    cols: list[int] = []
    data: list[int] = []
    for i, ch in enumerate(chains2):
        for t, c in ch.items():
            rows.append(i)
            cols.append(edge_ids.setdefault(t, len(edge_ids)))
            data.append(c)
    A = sp.csr_matrix((data, (rows, cols)), shape=(n, max(len(edge_ids), 1)),
                      dtype=np.int64)
    layers = [
        (A >= 1).astype(np.int64),
        (A >= 2).astype(np.int64),
        (A <= -1).astype(np.int64),
        (A <= -2).astype(np.int64),
    ]
    S = sum((L @ L.T for L in layers), start=sp.csr_matrix((n, n), dtype=np.int64))
    l2 = np.asarray(abs(A).sum(axis=1)).ravel().astype(np.int64)
    K2 = l2[:, None] + l2[None, :] - 2 * S.toarray()
    np.fill_diagonal(K2, 0)
    return K2


def kernel_from_bicombing(spec: BicombingSpec, radius: int | None = None,
                          scan_split: tuple[int, int] | None = None) -> DisplacementKernel:
    """Kernel K(x, y) = ||q[e,x] - q[e,y]||_1 over the ball prefix of the given
    radius, computed by exact chain arithmetic.  The displacement constant is
    the two-sided empirical excess max |K(sx,sy) - K(x,y)| over the scan split
    (s up to the first radius, pairs up to the second)."""
    b = spec.ball
    if radius is None:
        radius = b.radius
    if radius > b.radius:
        raise OutOfBallError(
            f"kernel radius {radius} exceeds the ball radius {b.radius}"
        )
    n = b.size_within(radius)
    chains2 = [_doubled_chain(spec, b.elements[i]) for i in range(n)]
    if any(abs(c) > 2 for ch in chains2 for c in ch.values()) or n <= 1024:
        K2 = _pairwise_l1_loop(chains2)
    else:
        K2 = _pairwise_l1_sparse(chains2)
        if n <= 1400:  # cheap self-check band
            assert np.array_equal(K2, _pairwise_l1_loop(chains2))
    kernel = DisplacementKernel(
        ball=b,
        values=K2.astype(np.float64) / 2.0,
        twice=K2,
        provenance="bicombing",
        displacement_constant=0.0,
        radius=radius,
        bicombing=spec,
    )
    if scan_split is None:
        scan_split = (radius // 2, radius - radius // 2)
    r_s, r_xy = scan_split
    m = empirical_displacement_constant(kernel, r_s, r_xy)
    kernel.displacement_constant = m
    kernel.scan_info = {"s_radius": r_s, "pair_radius": r_xy, "two_sided": True}
    return kernel


def kernel_from_matrix(ball: CayleyBall, values: np.ndarray, provenance: str,
                       displacement_constant: float, radius: int,
                       twice: np.ndarray | None = None) -> DisplacementKernel:
    """Wrap a precomputed symmetric matrix (used by action and user kernels)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape[0] != values.shape[1]:
        raise ValueError("kernel matrix must be square")
    if not np.array_equal(values, values.T):
        raise ValueError("kernel matrix must be symmetric")
    if np.any(np.diag(values) != 0.0):
        raise ValueError("kernel diagonal must vanish")
    if np.any(values < 0.0):
        raise ValueError("kernel values must be nonnegative")
    return DisplacementKernel(
        ball=ball, values=values, twice=twice, provenance=provenance,
        displacement_constant=displacement_constant, radius=radius,
    )


# -- displacement ------------------------------------------------------------


def _translate_indices(kernel: DisplacementKernel, s: str, indices) -> list[int]:
    out = []
    for i in indices:
        j = kernel.ball.canonical_index(s + kernel.ball.elements[i])
        if j is None or j >= kernel.n:
            raise OutOfBallError(
                f"translate of {kernel.ball.elements[i]!r} by {s!r} left the kernel ball"
            )
        out.append(j)
    return out


def displacement_excess(kernel: DisplacementKernel, s: str, indices=None,
                        verify_decomposition: bool | None = None) -> float:
    """max over x, y in the index set of K(sx, sy) - K(x, y).

    For antisymmetric combing kernels the excess of every pair is verified
    against its exact two-triangle area bound (see
    :func:`two_triangle_bound`); a violation raises
    :class:`DecompositionError`.
    """
    if indices is None:
        indices = range(kernel.n)
    indices = list(indices)
    trans = _translate_indices(kernel, s, indices)
    if verify_decomposition is None:
        verify_decomposition = (
            kernel.provenance == "bicombing"
            and kernel.bicombing is not None
            and (kernel.bicombing.antisymmetrized
                 or kernel.bicombing.kind == "tree_geodesic")
        )
    base = np.ix_(indices, indices)
    image = np.ix_(trans, trans)
    if kernel.twice is not None:
        diff2 = kernel.twice[image] - kernel.twice[base]
        best = float(diff2.max()) / 2.0
    else:
        best = float((kernel.values[image] - kernel.values[base]).max())
    if verify_decomposition:
        for row in displacement_decomposition(kernel, s, indices):
            if row.excess > row.area_first + row.area_second:
                raise DecompositionError(
                    f"excess {row.excess} for pair ({row.x!r}, {row.y!r}) under "
                    f"{s!r} exceeds triangle bound {row.area_first + row.area_second}"
                )
    return best


@dataclass(frozen=True)
class DecompositionRow:
    x: str
    y: str
    excess: Fraction
    area_first: Rational
    area_second: Rational


def two_triangle_bound(spec: BicombingSpec, s: str, x: str, y: str) -> tuple:
    """The two exact triangle areas whose sum bounds K(sx,sy) - K(x,y) for an
    antisymmetric combing: ||q[e,sx] + q[sx,sy] + q[sy,e]||_1 and
    ||q[sy,sx] + q[sx,s] + q[s,sy]||_1."""
    b = spec.ball
    sx = b.name(s + x)
    sy = b.name(s + y)
    return area(spec, "", sx, sy), area(spec, sy, sx, s)


def displacement_decomposition(kernel: DisplacementKernel, s: str,
                               indices) -> list[DecompositionRow]:
    """Exact per-pair excesses with their two-triangle bounds (antisymmetric
    combing kernels)."""
    spec = kernel.bicombing
    if spec is None:
        raise ValueError("decomposition requires a combing-backed kernel")
    if not (spec.antisymmetrized or spec.kind == "tree_geodesic"):
        raise ValueError(
            "the two-triangle decomposition needs an antisymmetric combing"
        )
    indices = list(indices)
    trans = _translate_indices(kernel, s, indices)
    rows = []
    for a, ta in zip(indices, trans):
        for bidx, tb in zip(indices, trans):
            if bidx <= a:
                continue
            excess = kernel.exact(ta, tb) - kernel.exact(a, bidx)
            t1, t2 = two_triangle_bound(
                spec, s, kernel.ball.elements[a], kernel.ball.elements[bidx]
            )
            rows.append(DecompositionRow(
                x=kernel.ball.elements[a], y=kernel.ball.elements[bidx],
                excess=excess, area_first=t1, area_second=t2,
            ))
    return rows


def empirical_displacement_constant(kernel: DisplacementKernel, s_radius: int,
                                    pair_radius: int) -> float:
    """Two-sided displacement bound max |K(sx, sy) - K(x, y)| over s in the
    s_radius ball and pairs in the pair_radius ball.  Two-sidedness makes
    sqrt(M/2) + 1 a valid uniform bound on the scanned range."""
    b = kernel.ball
    if b.size_within(s_radius + pair_radius) > kernel.n:
        raise OutOfBallError(
            f"scan split ({s_radius}, {pair_radius}) exceeds the kernel radius"
        )
    pair_indices = list(b.indices_within(pair_radius))
    base = np.ix_(pair_indices, pair_indices)
    best = 0.0
    for s_idx in b.indices_within(s_radius):
        s = b.elements[s_idx]
        if s == "":
            continue
        trans = _translate_indices(kernel, s, pair_indices)
        image = np.ix_(trans, trans)
        if kernel.twice is not None:
            val = float(np.abs(kernel.twice[image] - kernel.twice[base]).max()) / 2.0
        else:
            val = float(np.abs(kernel.values[image] - kernel.values[base]).max())
        best = max(best, val)
    return best


# -- conditional negative definiteness ----------------------------------------


def _mean_zero_basis(n: int) -> np.ndarray:
    # orthonormal Helmert-style basis of the mean-zero subspace
    q = np.zeros((n, n - 1))
    for k in range(1, n):
        q[:k, k - 1] = 1.0
        q[k, k - 1] = -float(k)
        q[:, k - 1] /= np.sqrt(k * (k + 1))
    return q


def cnd_min_eigenvalue(kernel: DisplacementKernel, indices=None) -> float:
    """Minimum eigenvalue of -K/2 restricted to mean-zero vectors on the index
    set; >= -1e-9 certifies conditional negative definiteness at the
    documented tolerance."""
    if indices is None:
        indices = range(kernel.n)
    indices = list(indices)
    if len(indices) < 2:
        raise ValueError("need at least two elements for a centered eigenvalue")
    sub = kernel.values[np.ix_(indices, indices)]
    a = -0.5 * sub
    q = _mean_zero_basis(len(indices))
    m = q.T @ a @ q
    m = 0.5 * (m + m.T)
    return float(np.linalg.eigvalsh(m).min())


# -- cross validation ---------------------------------------------------------


def kernel_cross_validate(spec: BicombingSpec, radius: int | None = None,
                          kernel: DisplacementKernel | None = None,
                          tol: Fraction = Fraction(0)) -> Fraction:
    """Max discrepancy between chain-arithmetic kernel values and the slot
    embedding's squared distances over all scanned pairs; exactly 0 in exact
    arithmetic.  Antisymmetrized chains are doubled to integer chains first
    and the squared distance rescaled by 1/2."""
    b = spec.ball
    if radius is None:
        radius = b.radius if kernel is None else kernel.radius
    n = b.size_within(radius)
    if kernel is None:
        kernel = kernel_from_bicombing(spec, radius=radius)
    if n > kernel.n:
        raise OutOfBallError("cross-validation radius exceeds the kernel radius")
    features = []
    for i in range(n):
        doubled = Chain1({e: c for e, c in _doubled_chain(spec, b.elements[i]).items()})
        features.append(feature_embed(doubled))
    worst = Fraction(0)
    for i in range(n):
        fi = features[i]
        for j in range(i + 1, n):
            embedded = Fraction(fi.squared_distance(features[j]), 2)
            disc = abs(kernel.exact(i, j) - embedded)
            if disc > worst:
                worst = disc
    if worst > tol:
        raise AssertionError(
            f"cross-validation discrepancy {worst} exceeds tolerance {tol}"
        )
    return worst
