"""Mean-zero vectors, the split norm, the translation representation and its
cocycle, uniform bounds, and properness reporting.

The space is spanned by finitely supported real functions on group elements
with mean zero.  A displacement kernel K induces the seminorm

    ||v||_f = (-1/2 sum_{x,y} v(x) v(y) K(x, y))^(1/2),

and the working norm is ||v||_E = ||v||_f + ||v||_1.  The left translation
representation pi(s)v(x) = v(s^-1 x) preserves ||.||_1 exactly and moves
||.||_f by at most the displacement excess of K; the cocycle b(s) =
delta_s - delta_e turns pi into an affine action whose growth is governed by
K(s, e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .groups import CayleyBall
from .kernel import DisplacementKernel

FORM_HARD_FLOOR = -1e-6
BOUND_TOLERANCE = 1e-9


class SupportEscapeError(LookupError):
    """A vector's support (or its translate) left the kernel's ball."""


class NonCndFormError(ArithmeticError):
    """The quadratic form went below the hard floor: the kernel is not
    conditionally negative definite (construction bug)."""


class MeanZeroError(ValueError):
    """Coefficients do not sum to zero."""


class EVector:
    """Finitely supported mean-zero function on group elements.

    Integer-built vectors stay integer-exact under translation and chain
    arithmetic; float-built vectors must have mean zero within 1e-12 of their
    coefficient scale.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[str, float] | None = None):
        cleaned = {w: c for w, c in (coeffs or {}).items() if c}
        total = sum(cleaned.values())
        if cleaned:
            scale = max(abs(c) for c in cleaned.values())
            if isinstance(total, int):
                if total != 0:
                    raise MeanZeroError(f"coefficients sum to {total}, not 0")
            elif abs(total) > 1e-12 * max(scale, 1.0):
                raise MeanZeroError(f"coefficients sum to {total}, not 0")
        self.coeffs = cleaned

    def __eq__(self, other):
        return isinstance(other, EVector) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"EVector({self.coeffs!r})"

    def __add__(self, other: "EVector") -> "EVector":
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            v = out.get(w, 0) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        res = EVector.__new__(EVector)
        res.coeffs = out
        return res

    def __sub__(self, other: "EVector") -> "EVector":
        return self + other.scale(-1)

    def scale(self, factor) -> "EVector":
        res = EVector.__new__(EVector)
        res.coeffs = {w: c * factor for w, c in self.coeffs.items()} if factor else {}
        return res

    def l1_norm(self):
        return sum(abs(c) for c in self.coeffs.values())

    def max_abs(self):
        return max((abs(c) for c in self.coeffs.values()), default=0)

    def support(self) -> list[str]:
        return sorted(self.coeffs)


def cocycle(s: str) -> EVector:
    """b(s) = delta_s - delta_e; b(e) = 0."""
    if s == "":
        return EVector()
    return EVector({s: 1, "": -1})


def rep_apply(s: str, v: EVector, ball: CayleyBall) -> EVector:
    """pi(s) v: support shifted left by s.  Mean zero and the l1 norm are
    preserved exactly; coefficients are untouched."""
    res = EVector.__new__(EVector)
    res.coeffs = {ball.mul(s, w): c for w, c in v.coeffs.items()}
    return res


def check_cocycle_identity(s: str, t: str, ball: CayleyBall):
    """Max coefficient residual of b(st) - pi(s) b(t) - b(s); exactly 0."""
    st = ball.mul(s, t)
    residual = cocycle(st) - rep_apply(s, cocycle(t), ball) - cocycle(s)
    return residual.max_abs()


# -- norms ---------------------------------------------------------------------


def _support_indices(v: EVector, kernel: DisplacementKernel) -> tuple[list[int], np.ndarray]:
    idx = []
    coeffs = []
    for w, c in v.coeffs.items():
        j = kernel.ball.canonical_index(w)
        if j is None or j >= kernel.n:
            raise SupportEscapeError(f"support element {w!r} is outside the kernel ball")
        idx.append(j)
        coeffs.append(float(c))
    return idx, np.asarray(coeffs)


def quadratic_form(v: EVector, kernel: DisplacementKernel) -> float:
    """-1/2 sum v(x) v(y) K(x, y); nonnegative for CND kernels up to noise."""
    if not v.coeffs:
        return 0.0
    idx, c = _support_indices(v, kernel)
    sub = kernel.values[np.ix_(idx, idx)]
    return float(-0.5 * c @ sub @ c)


def norm_f(v: EVector, kernel: DisplacementKernel) -> float:
    q = quadratic_form(v, kernel)
    if q < FORM_HARD_FLOOR:
        raise NonCndFormError(
            f"quadratic form value {q} is below {FORM_HARD_FLOOR}; "
            "the kernel is not conditionally negative definite"
        )
    return math.sqrt(max(q, 0.0))


def norm_e(v: EVector, kernel: DisplacementKernel) -> float:
    return norm_f(v, kernel) + float(v.l1_norm())


# -- the per-vector inequality ---------------------------------------------------


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    passed: bool
    excess: float


def per_vector_bound_check(s: str, v: EVector, kernel: DisplacementKernel) -> BoundCheck:
    """Check ||pi(s)v||_f^2 - ||v||_f^2 <= (excess/2) ||v||_1^2 + 1e-9, where
    the excess is the exact two-sided displacement of K over the support:
    max |K(sx, sy) - K(x, y)|.  (The one-sided maximum does not bound the
    form difference when some pair contracts strictly while none expands, so
    the two-sided quantity is the one the inequality needs.)"""
    if not v.coeffs:
        return BoundCheck(0.0, 0.0, True, 0.0)
    idx, _ = _support_indices(v, kernel)
    trans = []
    for w in v.coeffs:
        j = kernel.ball.canonical_index(s + w)
        if j is None or j >= kernel.n:
            raise SupportEscapeError(
                f"translate of support element {w!r} by {s!r} left the kernel ball"
            )
        trans.append(j)
    base = np.ix_(idx, idx)
    image = np.ix_(trans, trans)
    if kernel.twice is not None:
        excess = float(np.abs(kernel.twice[image] - kernel.twice[base]).max()) / 2.0
    else:
        excess = float(np.abs(kernel.values[image] - kernel.values[base]).max())
    lhs = quadratic_form(rep_apply(s, v, kernel.ball), kernel) - quadratic_form(v, kernel)
    l1 = float(v.l1_norm())
    rhs = 0.5 * excess * l1 * l1
    return BoundCheck(lhs=lhs, rhs=rhs, passed=lhs <= rhs + BOUND_TOLERANCE, excess=excess)


def uniform_bound(displacement_constant: float) -> float:
    """sqrt(M/2) + 1: the operator-norm bound the displacement constant buys."""
    if displacement_constant < 0:
        raise ValueError("displacement constant must be nonnegative")
    return math.sqrt(displacement_constant / 2.0) + 1.0


# -- operator norm probing -------------------------------------------------------


@dataclass(frozen=True)
class OpNormConfig:
    restarts: int = 32
    iterations: int = 500
    decay_every: int = 50
    decay: float = 0.5
    initial_step: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class OpNormResult:
    value: float
    iterations: int
    restarts: int
    seed: int


def op_norm_lower_bound(s: str, kernel: DisplacementKernel, radius: int,
                        config: OpNormConfig = OpNormConfig()) -> OpNormResult:
    """Best found ||pi(s)v||_E / ||v||_E over mean-zero v supported in the
    radius ball: seeded multi-start coordinate-perturbation ascent.  This is a
    lower bound on the restricted operator norm, never the norm itself."""
    ball = kernel.ball
    n = ball.size_within(radius)
    if n < 2:
        raise ValueError("need at least two elements to span mean-zero vectors")
    base_idx = list(range(n))
    trans_idx = _translate_for_opnorm(s, kernel, base_idx)
    if s == "":
        return OpNormResult(value=1.0, iterations=0, restarts=0, seed=config.seed)
    k_base = kernel.values[np.ix_(base_idx, base_idx)]
    k_trans = kernel.values[np.ix_(trans_idx, trans_idx)]

    def ratio(vec: np.ndarray) -> float:
        l1 = float(np.abs(vec).sum())
        if l1 <= 0.0:
            return 0.0
        qb = float(-0.5 * vec @ k_base @ vec)
        qt = float(-0.5 * vec @ k_trans @ vec)
        den = math.sqrt(max(qb, 0.0)) + l1
        num = math.sqrt(max(qt, 0.0)) + l1
        return num / den

    best = 0.0
    total_iters = 0
    for restart in range(config.restarts):
        rng = np.random.default_rng(config.seed * 100_003 + restart)
        vec = rng.standard_normal(n)
        vec -= vec.mean()
        current = ratio(vec)
        step = config.initial_step
        for it in range(config.iterations):
            total_iters += 1
            if it and it % config.decay_every == 0:
                step *= config.decay
            j = rng.integers(n)
            delta = step * (1.0 if rng.integers(2) else -1.0)
            trial = vec.copy()
            trial[j] += delta
            trial -= trial.mean()
            val = ratio(trial)
            if val > current:
                vec, current = trial, val
        best = max(best, current)
    return OpNormResult(value=best, iterations=total_iters,
                        restarts=config.restarts, seed=config.seed)


def _translate_for_opnorm(s, kernel, indices):
    out = []
    for i in indices:
        j = kernel.ball.canonical_index(s + kernel.ball.elements[i])
        if j is None or j >= kernel.n:
            raise SupportEscapeError(
                f"translate of {kernel.ball.elements[i]!r} by {s!r} left the kernel ball"
            )
        out.append(j)
    return out


# -- properness reporting --------------------------------------------------------


class PropernessError(AssertionError):
    """A cocycle norm row fell below its properness lower bound."""


@dataclass(frozen=True)
class NormRow:
    word: str
    distance: int
    norm_f: float
    norm_l1: float
    norm_e: float
    lower_bound: float


@dataclass
class NormReport:
    rows: list[NormRow] = field(default_factory=list)

    def sphere_minima(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for row in self.rows:
            cur = out.get(row.distance)
            if cur is None or row.norm_e < cur:
                out[row.distance] = row.norm_e
        return out

    def sphere_maxima(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for row in self.rows:
            cur = out.get(row.distance)
            if cur is None or row.norm_e > cur:
                out[row.distance] = row.norm_e
        return out


def properness_report(kernel: DisplacementKernel, radius: int | None = None,
                      enforce_lower_bound: bool | None = None) -> NormReport:
    """Per-element rows (s, d(e,s), ||b(s)||_f, ||b(s)||_1, ||b(s)||_E,
    sqrt(d) + 2) for s != e.  ||b(s)||_f = sqrt(K(s, e)) directly from the
    kernel.  For combing kernels ||q[e,s]||_1 >= d(e,s), so every row must
    satisfy ||b(s)||_E >= sqrt(d) + 2 - 1e-9; a failing element raises
    :class:`PropernessError` naming it."""
    if radius is None:
        radius = kernel.radius
    if enforce_lower_bound is None:
        enforce_lower_bound = kernel.provenance == "bicombing"
    ball = kernel.ball
    n = min(ball.size_within(radius), kernel.n)
    report = NormReport()
    for i in range(1, n):
        word = ball.elements[i]
        d = ball.distances[i]
        nf = math.sqrt(max(kernel.value(i, 0), 0.0))
        ne = nf + 2.0
        lower = math.sqrt(d) + 2.0
        if enforce_lower_bound and ne < lower - BOUND_TOLERANCE:
            raise PropernessError(
                f"||b({word})||_E = {ne} is below the lower bound {lower}"
            )
        report.rows.append(NormRow(
            word=word, distance=d, norm_f=nf, norm_l1=2.0, norm_e=ne,
            lower_bound=lower,
        ))
    return report
