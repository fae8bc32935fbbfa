"""Isometric actions on trees and validated quasi-tree kernel inputs.

A tree action is presented by a homomorphism from the source group to a free
group acting on its own Cayley tree; the orbit of the basepoint e pulls the
tree metric back to a displacement kernel with constant 0 (the action is
isometric).  Quasi-tree geometry enters only through user-supplied kernels
checked against the sandwich d - Delta <= K <= d and conditional negative
definiteness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .groups import (
    CayleyBall,
    GroupPresentation,
    free_reduce,
    invert,
)
from .kernel import DisplacementKernel, _mean_zero_basis, kernel_from_matrix
from .espace import NormReport, NormRow

CND_TOLERANCE = -1e-9


class ActionError(ValueError):
    """Invalid action description (not a homomorphism, bad letters...)."""


@dataclass(frozen=True)
class TreeActionSpec:
    """Homomorphism to a free group, acting on that group's Cayley tree with
    basepoint e.  Validated so that every source relator maps to a word that
    freely reduces to the identity."""

    presentation: GroupPresentation
    target_rank: int
    images: dict[str, str] = field(hash=False)

    def __post_init__(self):
        if self.target_rank < 1:
            raise ActionError("target rank must be >= 1")
        target_letters = set(_target_alphabet(self.target_rank))
        for g in self.presentation.generators:
            if g not in self.images:
                raise ActionError(f"no image given for generator {g!r}")
        for g, img in self.images.items():
            if g not in self.presentation.generators:
                raise ActionError(f"image given for unknown generator {g!r}")
            for ch in img:
                if ch not in target_letters:
                    raise ActionError(
                        f"image of {g!r} uses letter {ch!r} outside the rank-"
                        f"{self.target_rank} target alphabet"
                    )
        for rel in self.presentation.relators:
            if free_reduce(self.apply(rel)) != "":
                raise ActionError(
                    f"not a homomorphism: relator {rel!r} maps to "
                    f"{free_reduce(self.apply(rel))!r}, not the identity"
                )

    def apply(self, word: str) -> str:
        """Image of a source word in the target free group (freely reduced)."""
        out = []
        for ch in word:
            img = self.images[ch.lower()]
            out.append(img if ch.islower() else invert(img))
        return free_reduce("".join(out))


def _target_alphabet(rank: int) -> str:
    letters = "abcdfghijklmnopqrstuvwxyz"  # 'e' stays reserved for the identity
    if rank > len(letters):
        raise ActionError(f"target rank {rank} exceeds the supported alphabet")
    return "".join(letters[i] + letters[i].upper() for i in range(rank))


def parse_action(text: str, presentation: GroupPresentation) -> TreeActionSpec:
    """Parse the action format: a ``target_rank: k`` line followed by one
    ``g -> word`` line per source generator (``e`` or an empty right side is
    the identity).  Comments start with ``#``."""
    rank = None
    images: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("target_rank:"):
            if rank is not None:
                raise ActionError("target_rank specified twice")
            try:
                rank = int(line.split(":", 1)[1])
            except ValueError:
                raise ActionError(f"bad target_rank line {line!r}") from None
            continue
        if "->" not in line:
            raise ActionError(f"action line {line!r} lacks '->'")
        gen, _, img = line.partition("->")
        gen = gen.strip()
        img = img.strip()
        if img == "e":
            img = ""
        if gen in images:
            raise ActionError(f"image of {gen!r} specified twice")
        images[gen] = img
    if rank is None:
        raise ActionError("missing target_rank: line")
    return TreeActionSpec(presentation=presentation, target_rank=rank, images=images)


def orbit_kernel(action: TreeActionSpec, ball: CayleyBall) -> DisplacementKernel:
    """K(s, t) = tree distance between the images of s and t: the reduced word
    length of phi(s)^-1 phi(t).  The action is isometric, so the displacement
    constant is exactly 0."""
    n = len(ball)
    images = [action.apply(w) for w in ball.elements]
    inverses = [invert(img) for img in images]
    twice = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        inv_i = inverses[i]
        for j in range(i + 1, n):
            d = len(free_reduce(inv_i + images[j]))
            twice[i, j] = 2 * d
            twice[j, i] = 2 * d
    return kernel_from_matrix(
        ball=ball,
        values=twice.astype(np.float64) / 2.0,
        provenance="tree_action",
        displacement_constant=0.0,
        radius=ball.radius,
        twice=twice,
    )


# -- quasi-tree kernel inputs ---------------------------------------------------


@dataclass(frozen=True)
class QuasiTreeKernelInput:
    """Pairwise kernel data on labeled elements with a declared displacement
    constant, to be checked against d - delta <= K <= d."""

    labels: tuple[str, ...]
    distances: dict[tuple[str, str], float] = field(hash=False)
    kernel_values: dict[tuple[str, str], float] = field(hash=False)
    delta: float = 0.0


def parse_quasitree_csv(text: str) -> QuasiTreeKernelInput:
    """Parse the quasi-tree kernel format: a ``delta: value`` header line, the
    column header ``x,y,d,K``, then one pair per row.  Every unordered pair of
    the labels appearing must be present."""
    delta = None
    rows = []
    saw_header = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("delta:"):
            delta = float(line.split(":", 1)[1])
            continue
        if line.replace(" ", "") == "x,y,d,K":
            saw_header = True
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise ActionError(f"bad kernel row {line!r}")
        x, y, d, k = parts
        rows.append((x, y, float(d), float(k)))
    if delta is None:
        raise ActionError("missing delta: header line")
    if not saw_header:
        raise ActionError("missing x,y,d,K column header")
    labels: list[str] = []
    for x, y, _, _ in rows:
        for lbl in (x, y):
            if lbl not in labels:
                labels.append(lbl)
    distances: dict[tuple[str, str], float] = {}
    kernel_values: dict[tuple[str, str], float] = {}
    for x, y, d, k in rows:
        key = (x, y) if x <= y else (y, x)
        distances[key] = d
        kernel_values[key] = k
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            key = (x, y) if x <= y else (y, x)
            if key not in kernel_values:
                raise ActionError(f"missing kernel row for pair ({x!r}, {y!r})")
    return QuasiTreeKernelInput(
        labels=tuple(labels), distances=distances, kernel_values=kernel_values,
        delta=delta,
    )


@dataclass
class QuasiTreeReport:
    passed: bool
    failures: list[str]
    min_eigenvalue: float
    delta: float
    displacement_checked: bool


def validate_quasitree_kernel(data: QuasiTreeKernelInput,
                              translations: list[dict[str, str]] | None = None
                              ) -> QuasiTreeReport:
    """Check the sandwich d - delta <= K <= d on every pair and conditional
    negative definiteness (centered minimum eigenvalue >= -1e-9).  When
    translation tables are supplied, also check the derived displacement bound
    K(sx, sy) <= K(x, y) + delta on pairs whose images are listed; otherwise
    the declared delta is recorded as-is."""
    failures: list[str] = []
    labels = data.labels
    pos = {lbl: i for i, lbl in enumerate(labels)}
    n = len(labels)
    mat = np.zeros((n, n))

    def pair(x: str, y: str) -> tuple[str, str]:
        return (x, y) if x <= y else (y, x)

    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            key = pair(x, y)
            k = data.kernel_values[key]
            d = data.distances[key]
            mat[pos[x], pos[y]] = mat[pos[y], pos[x]] = k
            if k > d + 1e-12:
                failures.append(f"upper bound violated on ({x!r}, {y!r}): K={k} > d={d}")
            if k < d - data.delta - 1e-12:
                failures.append(
                    f"lower bound violated on ({x!r}, {y!r}): K={k} < d - delta = {d - data.delta}"
                )
            if k < 0:
                failures.append(f"negative kernel value on ({x!r}, {y!r})")
    min_eig = float("nan")
    if n >= 2:
        a = -0.5 * mat
        q = _mean_zero_basis(n)
        m = q.T @ a @ q
        min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.T)).min())
        if min_eig < CND_TOLERANCE:
            failures.append(
                f"conditional negative definiteness fails: centered min eigenvalue {min_eig}"
            )
    displacement_checked = False
    if translations:
        displacement_checked = True
        for table in translations:
            for i, x in enumerate(labels):
                for y in labels[i + 1:]:
                    sx, sy = table.get(x), table.get(y)
                    if sx is None or sy is None or sx == sy:
                        continue
                    if sx not in pos or sy not in pos:
                        continue
                    lhs = data.kernel_values[pair(sx, sy)]
                    rhs = data.kernel_values[pair(x, y)] + data.delta
                    if lhs > rhs + 1e-12:
                        failures.append(
                            f"displacement bound violated: K({sx!r},{sy!r}) = {lhs} > "
                            f"K({x!r},{y!r}) + delta = {rhs}"
                        )
    return QuasiTreeReport(
        passed=not failures,
        failures=failures,
        min_eigenvalue=min_eig,
        delta=data.delta,
        displacement_checked=displacement_checked,
    )


# -- orbit growth -----------------------------------------------------------------


@dataclass
class GrowthReport:
    norm_report: NormReport
    verdict: str
    fitted_constant: float
    sphere_maxima: dict[int, float]


def orbit_growth_report(kernel: DisplacementKernel, radius: int | None = None,
                        element_filter=None) -> GrowthReport:
    """Cocycle growth along orbits: rows ||b(s)||_E = sqrt(K(s, e)) + 2, and a
    verdict.  The largest c > 0 with max_{|s|=n} ||b(s)||_E >= sqrt(c n) + 2
    on every scanned sphere is fitted; a positive fit reads "unbounded on
    scanned range", otherwise "bounded on scanned range".  The verdict only
    ever speaks about the scanned range."""
    ball = kernel.ball
    if radius is None:
        radius = kernel.radius
    n = min(ball.size_within(radius), kernel.n)
    report = NormReport()
    for i in range(1, n):
        word = ball.elements[i]
        if element_filter is not None and not element_filter(word):
            continue
        d = ball.distances[i]
        nf = math.sqrt(max(kernel.value(i, 0), 0.0))
        report.rows.append(NormRow(
            word=word, distance=d, norm_f=nf, norm_l1=2.0, norm_e=nf + 2.0,
            lower_bound=2.0,
        ))
    maxima = report.sphere_maxima()
    if not maxima:
        return GrowthReport(report, "bounded on scanned range", 0.0, {})
    fitted = min(
        (m - 2.0) ** 2 / r for r, m in maxima.items() if r >= 1
    ) if any(r >= 1 for r in maxima) else 0.0
    verdict = "unbounded on scanned range" if fitted > 1e-12 else "bounded on scanned range"
    return GrowthReport(
        norm_report=report, verdict=verdict, fitted_constant=fitted,
        sphere_maxima=maxima,
    )
