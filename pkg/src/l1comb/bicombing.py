"""Combings as equivariant 1-chains on Cayley graphs, with exact arithmetic.

A combing assigns to each ordered vertex pair (x, y) a 1-chain q[x, y] whose
boundary is y - x.  Chains here are finitely supported maps from canonically
oriented edges (source word, lowercase generator) to rationals; path combings
take values in {-1, 0, 1} and antisymmetrized combings in half-integers.
Coefficients stay int/Fraction end to end so l1 norms and triangle areas are
exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .groups import CayleyBall, GroupPresentation, OutOfBallError, invert

Edge = tuple[str, str]  # (source vertex word, lowercase generator letter)

KINDS = ("tree_geodesic", "shortlex", "shortlex_antisymmetrized")


class Chain1:
    """Finitely supported rational 1-chain on oriented edges."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[Edge, Rational] | None = None):
        self.coeffs: dict[Edge, Rational] = {}
        if coeffs:
            for edge, c in coeffs.items():
                if c:
                    self.coeffs[edge] = c

    def __eq__(self, other):
        return isinstance(other, Chain1) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Chain1({self.coeffs!r})"

    def __add__(self, other: "Chain1") -> "Chain1":
        out = dict(self.coeffs)
        for edge, c in other.coeffs.items():
            v = out.get(edge, 0) + c
            if v:
                out[edge] = v
            else:
                out.pop(edge, None)
        res = Chain1()
        res.coeffs = out
        return res

    def __neg__(self) -> "Chain1":
        res = Chain1()
        res.coeffs = {edge: -c for edge, c in self.coeffs.items()}
        return res

    def __sub__(self, other: "Chain1") -> "Chain1":
        return self + (-other)

    def scale(self, factor: Rational) -> "Chain1":
        res = Chain1()
        if factor:
            res.coeffs = {edge: c * factor for edge, c in self.coeffs.items()}
        return res

    def l1_norm(self) -> Rational:
        return sum(abs(c) for c in self.coeffs.values())

    def is_integral(self) -> bool:
        return all(
            isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1)
            for c in self.coeffs.values()
        )


def chain_l1_norm(chain: Chain1) -> Rational:
    return chain.l1_norm()


def boundary(chain: Chain1, ball: CayleyBall) -> dict[str, Rational]:
    """Boundary 0-chain: +coefficient at the edge target, -coefficient at the
    source.  Vertex names come from the ball's canonical naming."""
    acc: dict[str, Rational] = {}
    for (src, g), c in chain.coeffs.items():
        tgt = ball.name(src + g)
        for v, s in ((tgt, c), (src, -c)):
            t = acc.get(v, 0) + s
            if t:
                acc[v] = t
            else:
                acc.pop(v, None)
    return acc


def chain_dump(chain: Chain1) -> str:
    """Debug/oracle format: one line per edge ``source letter coefficient``,
    sorted by (source, letter); the identity source prints as ``e``."""
    lines = []
    for (src, g), c in sorted(chain.coeffs.items()):
        frac = Fraction(c)
        lines.append(f"{src or 'e'} {g} {frac}")
    return "\n".join(lines)


@dataclass(frozen=True)
class BicombingSpec:
    """A pluggable combing bound to a presentation and a working ball.

    ``tree_geodesic`` follows unique free-group geodesics; ``shortlex`` follows
    the shortlex-least geodesic normal form (ball-relative in dehn mode, where
    normal forms are only canonical inside the enumerated ball);
    ``shortlex_antisymmetrized`` averages q[x,y] against -q[y,x].
    """

    kind: str
    ball: CayleyBall
    _cache: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown bicombing kind {self.kind!r}")
        mode = self.presentation.reduction_mode
        if self.kind == "tree_geodesic" and mode != "free":
            raise ValueError("tree_geodesic requires a free presentation")
        object.__setattr__(self, "_cache", {})

    @property
    def presentation(self) -> GroupPresentation:
        return self.ball.presentation

    @property
    def antisymmetrized(self) -> bool:
        return self.kind == "shortlex_antisymmetrized"

    @property
    def ball_relative(self) -> bool:
        """True when combing words are only canonical inside the ball."""
        return not self.presentation.has_geodesic_normal_forms

    def canonical_of(self, word: str) -> str:
        """Canonical geodesic word of the element represented by ``word``."""
        pres = self.presentation
        if pres.has_geodesic_normal_forms:
            return pres.normal(word)
        idx = self.ball.canonical_index(word)
        if idx is None:
            raise OutOfBallError(
                f"{word!r} has no canonical form inside the radius-"
                f"{self.ball.radius} ball"
            )
        return self.ball.elements[idx]


def make_bicombing(kind: str, ball: CayleyBall) -> BicombingSpec:
    return BicombingSpec(kind, ball)


def antisymmetrize(spec: BicombingSpec) -> BicombingSpec:
    """Combing with chains (q[x,y] - q[y,x]) / 2; exact antisymmetry by
    construction.  Tree geodesics are already antisymmetric but gain nothing
    and lose nothing from the averaging."""
    if spec.antisymmetrized:
        return spec
    return BicombingSpec("shortlex_antisymmetrized", spec.ball)


def _raw_accumulate(spec: BicombingSpec, x: str, y: str,
                    acc: dict[Edge, Rational], factor: Rational) -> None:
    """Add ``factor`` times the geodesic path chain from x to y into ``acc``."""
    ball = spec.ball
    z = spec.canonical_of(invert(x) + y)
    base = x == ""
    cur = x
    for ch in z:
        if base:
            nxt = cur[:-1] if (cur and cur[-1] == ch.swapcase()) else cur + ch
        else:
            nxt = ball.name(cur + ch)
        if ch.islower():
            edge = (cur, ch)
            coeff = factor
        else:
            edge = (nxt, ch.lower())
            coeff = -factor
        v = acc.get(edge, 0) + coeff
        if v:
            acc[edge] = v
        else:
            acc.pop(edge, None)
        cur = nxt


def _accumulate(spec: BicombingSpec, x: str, y: str,
                acc: dict[Edge, Rational], factor: Rational = 1) -> None:
    if x == y:
        return
    if spec.antisymmetrized:
        half = Fraction(factor, 2)
        _raw_accumulate(spec, x, y, acc, half)
        _raw_accumulate(spec, y, x, acc, -half)
    else:
        _raw_accumulate(spec, x, y, acc, factor)


def combing_chain(spec: BicombingSpec, x: str, y: str) -> Chain1:
    """The chain q[x, y] = x . q[e, x^-1 y]; equivariant by construction and
    with boundary y - x."""
    acc: dict[Edge, Rational] = {}
    _accumulate(spec, x, y, acc)
    out = Chain1()
    out.coeffs = acc
    return out


def translate_chain(s: str, chain: Chain1, ball: CayleyBall) -> Chain1:
    """Left translation: relabel each edge (x, g) to (s x, g).  The relabeling
    is bijective, so the l1 norm is preserved exactly."""
    out = Chain1()
    out.coeffs = {
        (ball.name(s + src), g): c for (src, g), c in chain.coeffs.items()
    }
    return out


def area(spec: BicombingSpec, x: str, y: str, z: str) -> Rational:
    """Triangle defect ||q[x,y] + q[y,z] + q[z,x]||_1 (exact rational)."""
    acc: dict[Edge, Rational] = {}
    _accumulate(spec, x, y, acc)
    _accumulate(spec, y, z, acc)
    _accumulate(spec, z, x, acc)
    return sum(abs(c) for c in acc.values())


@dataclass(frozen=True)
class TriplePolicy:
    """Triple-scan policy: exhaustive below ``exhaustive_limit`` triples
    (ordered triples modulo cyclic rotation, degenerates included), seeded
    uniform sampling above."""

    exhaustive_limit: int = 200_000
    samples: int = 5000
    seed: int = 0


@dataclass(frozen=True)
class AreaScanResult:
    value: Rational
    witness: tuple[str, str, str]
    triples_scanned: int
    exhaustive: bool


def _cyclic_triple_count(n: int) -> int:
    # triples (i, j, k) with i = min(i, j, k): sum over i of (n - i)^2
    return n * (n + 1) * (2 * n + 1) // 6


def empirical_area_constant(spec: BicombingSpec, radius: int | None = None,
                            policy: TriplePolicy = TriplePolicy()) -> AreaScanResult:
    """Maximum triangle area over the policy's triple set, with the
    (lexicographically least) maximizing triple as witness."""
    ball = spec.ball
    if radius is None:
        radius = ball.radius
    n = ball.size_within(radius)
    elements = ball.elements
    best: Rational = 0
    witness = (0, 0, 0)
    exhaustive = _cyclic_triple_count(n) <= policy.exhaustive_limit
    scanned = 0
    # triples are visited in lexicographic order (exhaustive) or in seeded
    # order (sampled), so keeping the first maximizer is deterministic and,
    # for exhaustive scans, lexicographically least
    if exhaustive:
        for i in range(n):
            xi = elements[i]
            for j in range(i, n):
                xj = elements[j]
                for k in range(i, n):
                    val = area(spec, xi, xj, elements[k])
                    scanned += 1
                    if val > best:
                        best = val
                        witness = (i, j, k)
    else:
        rng = random.Random(policy.seed)
        for _ in range(policy.samples):
            i = rng.randrange(n)
            j = rng.randrange(n)
            k = rng.randrange(n)
            val = area(spec, elements[i], elements[j], elements[k])
            scanned += 1
            if val > best:
                best = val
                witness = (i, j, k)
    return AreaScanResult(
        value=best,
        witness=tuple(elements[t] for t in witness),
        triples_scanned=scanned,
        exhaustive=exhaustive,
    )


@dataclass(frozen=True)
class QuasiGeodesicConstants:
    lambda_emp: Fraction
    c_emp: Fraction
    pairs_scanned: int


def quasi_geodesic_constants(spec: BicombingSpec,
                             radius: int | None = None) -> QuasiGeodesicConstants:
    """Smallest (lambda, c) with d(x,y) <= ||q[x,y]||_1 <= lambda d(x,y) + c
    over scanned pairs.  By equivariance the scan reduces to pairs (e, z); the
    lower bound is asserted for every scanned pair (any chain with boundary
    z - e has l1 norm >= d(e, z))."""
    ball = spec.ball
    if radius is None:
        radius = ball.radius
    n = ball.size_within(radius)
    lam = Fraction(1)
    pairs = []
    for idx in range(1, n):
        z = ball.elements[idx]
        d = ball.distances[idx]
        length = combing_chain(spec, "", z).l1_norm()
        if length < d:
            raise AssertionError(
                f"combing chain for {z!r} has l1 norm {length} below d = {d}"
            )
        pairs.append((length, d))
        lam = max(lam, Fraction(length, d))
    c = Fraction(0)
    for length, d in pairs:
        c = max(c, Fraction(length) - lam * d)
    return QuasiGeodesicConstants(lambda_emp=lam, c_emp=c, pairs_scanned=n - 1)
