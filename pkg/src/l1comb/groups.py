"""Finitely presented group machinery: presentations, normal forms, Cayley balls.

Words are plain strings over single-letter lowercase generators; the uppercase
letter is the inverse of its generator and the empty string is the identity
(rendered as ``e`` in files and reports).  Three word-problem regimes are
supported:

* ``free`` -- free groups, free reduction only;
* ``dehn`` -- C'(1/6) small-cancellation presentations, Dehn's algorithm
  (the piece condition is machine-checked at parse time, otherwise the mode
  is refused);
* ``rewriting`` -- a user-supplied shortlex-decreasing rewriting system,
  checked for local confluence on all critical pairs at parse time.

Normal forms are canonical within a run.  In ``free`` and ``rewriting`` modes
the reduced word itself is canonical; in ``dehn`` mode greedy Dehn reduction
is not canonical (distinct half-relator words can represent equal elements),
so canonical shortlex-least geodesic words are assigned during Cayley-ball
enumeration and element identity is decided by the Dehn-algorithm triviality
oracle.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

GroupElement = str  # a normal-form word; "" is the identity
IDENTITY: GroupElement = ""

DEFAULT_BALL_CAP = 200_000

MODES = ("free", "dehn", "rewriting")


class PresentationError(ValueError):
    """Invalid presentation text or unsatisfied mode requirements."""


class WordError(ValueError):
    """A word uses letters outside the presentation's alphabet."""


class BallCapError(RuntimeError):
    """Ball enumeration exceeded the configured element cap."""


class OutOfBallError(LookupError):
    """An element fell outside the precomputed ball."""


class DistanceRangeError(LookupError):
    """Requested distance exceeds the allowed search radius."""


def invert(word: str) -> str:
    """Inverse word: reverse the letters and swap case."""
    return word[::-1].swapcase()


def free_reduce(word: str) -> str:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[str] = []
    for ch in word:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def _lcp_len(a: str, b: str) -> int:
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n


def _check_small_cancellation(relators: tuple[str, ...]) -> None:
    """Verify the C'(1/6) metric piece condition on the symmetrized relator set.

    Pieces are common prefixes of distinct positions in the list of all cyclic
    conjugates of relators and their inverses; identical strings at different
    positions count (this rejects proper-power relators).
    """
    conjugates: list[tuple[str, str]] = []  # (conjugate word, source relator)
    for rel in relators:
        if not rel:
            raise PresentationError("empty relator is not allowed in dehn mode")
        if free_reduce(rel) != rel or rel[0] == rel[-1].swapcase():
            raise PresentationError(
                f"relator {rel!r} is not cyclically reduced (dehn mode requires it)"
            )
        for w in (rel, invert(rel)):
            for k in range(len(w)):
                conjugates.append((w[k:] + w[:k], rel))
    for i, (w1, src1) in enumerate(conjugates):
        for j, (w2, _src2) in enumerate(conjugates):
            if i == j:
                continue
            p = _lcp_len(w1, w2)
            if 6 * p >= len(w1):
                raise PresentationError(
                    f"C'(1/6) violation: piece {w1[:p]!r} of length {p} occurs in "
                    f"relator {src1!r} of length {len(w1)}"
                )


def _build_dehn_table(relators: tuple[str, ...]) -> dict[str, str]:
    """Map every relator subword longer than half its relator to the shorter
    replacement (the inverse of the complementary piece)."""
    table: dict[str, str] = {}
    seen: set[str] = set()
    for rel in relators:
        for w in (rel, invert(rel)):
            for k in range(len(w)):
                conj = w[k:] + w[:k]
                if conj in seen:
                    continue
                seen.add(conj)
                half = len(conj) // 2
                for cut in range(half + 1, len(conj) + 1):
                    head, tail = conj[:cut], conj[cut:]
                    repl = invert(tail)
                    prev = table.get(head)
                    if prev is not None and prev != repl:
                        # cannot happen once C'(1/6) holds: a shared long
                        # subword would be an oversized piece
                        raise PresentationError(
                            f"ambiguous Dehn replacement for subword {head!r}"
                        )
                    table[head] = repl
    return table


def _apply_rules(word: str, rules: tuple[tuple[str, str], ...]) -> str:
    """Exhaustively rewrite with the leftmost-longest strategy."""
    changed = True
    while changed:
        changed = False
        n = len(word)
        for i in range(n):
            for lhs, rhs in rules:
                if word.startswith(lhs, i):
                    word = word[:i] + rhs + word[i + len(lhs):]
                    changed = True
                    break
            if changed:
                break
    return word


def _shortlex_key(word: str, rank: dict[str, int]) -> tuple:
    return (len(word), tuple(rank[ch] for ch in word))


def _check_rule_orientation(rules, rank):
    for lhs, rhs in rules:
        if _shortlex_key(rhs, rank) >= _shortlex_key(lhs, rank):
            raise PresentationError(
                f"rule {lhs!r} -> {rhs!r} does not decrease the shortlex order"
            )


def _check_local_confluence(rules: tuple[tuple[str, str], ...]) -> None:
    """Resolve every critical pair (overlap and containment) to a common form."""
    nf = lambda w: _apply_rules(w, rules)
    for (l1, r1), (l2, r2) in itertools.product(rules, repeat=2):
        # proper overlaps: a suffix of l1 equals a prefix of l2
        for k in range(1, min(len(l1), len(l2))):
            if l1.endswith(l2[:k]):
                one = r1 + l2[k:]
                two = l1[: len(l1) - k] + r2
                if nf(one) != nf(two):
                    raise PresentationError(
                        f"critical pair of {l1!r}->{r1!r} and {l2!r}->{r2!r} at "
                        f"overlap {l2[:k]!r} does not resolve: "
                        f"{nf(one)!r} != {nf(two)!r}"
                    )
        # containment: l2 occurs inside l1 (distinct rules, or distinct spot)
        start = 0
        while True:
            pos = l1.find(l2, start)
            if pos < 0:
                break
            start = pos + 1
            if (l1, r1) == (l2, r2) and pos == 0 and len(l1) == len(l2):
                continue
            one = r1
            two = l1[:pos] + r2 + l1[pos + len(l2):]
            if nf(one) != nf(two):
                raise PresentationError(
                    f"containment critical pair of {l1!r}->{r1!r} and "
                    f"{l2!r}->{r2!r} does not resolve: {nf(one)!r} != {nf(two)!r}"
                )


@dataclass(frozen=True)
class GroupPresentation:
    """A validated presentation with mode-specific reduction machinery."""

    generators: tuple[str, ...]
    relators: tuple[str, ...] = ()
    reduction_mode: str = "free"
    rewriting_rules: tuple[tuple[str, str], ...] = ()

    alphabet: str = field(init=False, repr=False, compare=False, default="")
    _rank: dict = field(init=False, repr=False, compare=False, default=None)
    _dehn_table: dict = field(init=False, repr=False, compare=False, default=None)
    _dehn_lens: tuple = field(init=False, repr=False, compare=False, default=())
    _rules: tuple = field(init=False, repr=False, compare=False, default=())
    _abelian_zero: bool = field(init=False, repr=False, compare=False, default=False)

    def __post_init__(self):
        gens = self.generators
        if not gens:
            raise PresentationError("at least one generator is required")
        for g in gens:
            if len(g) != 1 or not g.isalpha() or not g.islower():
                raise PresentationError(f"generator {g!r} must be a single lowercase letter")
            if g == "e":
                raise PresentationError("generator 'e' is reserved for the identity")
        if len(set(gens)) != len(gens):
            dup = next(g for g in gens if gens.count(g) > 1)
            raise PresentationError(f"duplicate generator {dup!r}")
        alphabet = "".join(g + g.upper() for g in gens)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "_rank", {ch: i for i, ch in enumerate(alphabet)})

        if self.reduction_mode not in MODES:
            raise PresentationError(f"unknown mode {self.reduction_mode!r}")
        letters = set(alphabet)
        for rel in self.relators:
            for ch in rel:
                if ch not in letters:
                    raise PresentationError(f"unknown letter {ch!r} in relator {rel!r}")

        if self.reduction_mode == "free":
            if self.relators:
                raise PresentationError("free mode admits no relators")
        elif self.reduction_mode == "dehn":
            _check_small_cancellation(self.relators)
            table = _build_dehn_table(self.relators)
            object.__setattr__(self, "_dehn_table", table)
            lens = tuple(sorted({len(k) for k in table}, reverse=True))
            object.__setattr__(self, "_dehn_lens", lens)
        else:
            for lhs, rhs in self.rewriting_rules:
                for ch in lhs + rhs:
                    if ch not in letters:
                        raise PresentationError(
                            f"unknown letter {ch!r} in rule {lhs!r} -> {rhs!r}"
                        )
                if not lhs:
                    raise PresentationError("rewriting rule with empty left side")
            # group structure always includes free cancellation
            rules = list(dict.fromkeys(self.rewriting_rules))
            for g in gens:
                for pair in (g + g.upper(), g.upper() + g):
                    if all(pair != lhs for lhs, _ in rules):
                        rules.append((pair, ""))
            rules = tuple(sorted(rules, key=lambda r: (-len(r[0]), r[0])))
            _check_rule_orientation(rules, self._rank)
            _check_local_confluence(rules)
            object.__setattr__(self, "_rules", rules)
            for rel in self.relators:
                if _apply_rules(rel, rules) != "":
                    raise PresentationError(
                        f"relator {rel!r} does not rewrite to the identity"
                    )

        object.__setattr__(
            self, "_abelian_zero",
            all(all(v == 0 for v in self.exponent_vector(r)) for r in self.relators),
        )

    # -- word utilities ----------------------------------------------------

    def check_word(self, word: str) -> None:
        for ch in word:
            if ch not in self._rank:
                raise WordError(f"unknown letter {ch!r} in word {word!r}")

    def exponent_vector(self, word: str) -> tuple[int, ...]:
        counts = [0] * len(self.generators)
        pos = {g: i for i, g in enumerate(self.generators)}
        for ch in word:
            if ch.islower():
                counts[pos[ch]] += 1
            else:
                counts[pos[ch.lower()]] -= 1
        return tuple(counts)

    def shortlex_key(self, word: str) -> tuple:
        return _shortlex_key(word, self._rank)

    def normal(self, word: str) -> str:
        """Mode-specific reduction (canonical in free/rewriting modes)."""
        if self.reduction_mode == "free":
            return free_reduce(word)
        if self.reduction_mode == "rewriting":
            return _apply_rules(word, self._rules)
        return self.dehn_reduce(word)

    def dehn_reduce(self, word: str) -> str:
        """Free reduction interleaved with greedy replacement of relator
        subwords longer than half their relator (leftmost, longest first)."""
        table = self._dehn_table
        word = free_reduce(word)
        if not table:
            return word
        lens = self._dehn_lens
        while True:
            n = len(word)
            hit = None
            for i in range(n):
                for L in lens:
                    if i + L > n:
                        continue
                    sub = word[i : i + L]
                    if sub in table:
                        hit = (i, L, table[sub])
                        break
                if hit:
                    break
            if hit is None:
                return word
            i, L, repl = hit
            word = free_reduce(word[:i] + repl + word[i + L :])

    def is_identity(self, word: str) -> bool:
        return self.normal(word) == ""

    def elements_equal(self, u: str, v: str) -> bool:
        if self.reduction_mode == "dehn":
            return self.is_identity(invert(u) + v)
        return self.normal(u) == self.normal(v)

    @property
    def has_geodesic_normal_forms(self) -> bool:
        # shortlex-decreasing confluent systems produce shortlex-least
        # representatives, which are geodesic; free reduction likewise
        return self.reduction_mode in ("free", "rewriting")


def reduce_word(word: str, presentation: GroupPresentation) -> GroupElement:
    """Canonical-in-mode reduction of an arbitrary word over the alphabet."""
    presentation.check_word(word)
    return presentation.normal(word)


def multiply(x: GroupElement, y: GroupElement, presentation: GroupPresentation) -> GroupElement:
    return reduce_word(x + y, presentation)


# -- presentation files ----------------------------------------------------

_SECTIONS = ("generators:", "relators:", "mode:", "rules:")


def parse_presentation(text: str) -> GroupPresentation:
    """Parse the line-oriented presentation format.

    Sections ``generators:``, ``relators:``, ``mode:`` and optional ``rules:``
    (one ``lhs -> rhs`` per line); ``#`` starts a comment; ``(none)`` stands
    for an empty relator list.
    """
    section = None
    gens: list[str] = []
    relators: list[str] = []
    mode: str | None = None
    rules: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head in _SECTIONS:
            section = head[:-1]
            line = line[len(head):].strip()
            if not line:
                continue
        if section is None:
            raise PresentationError(f"content before any section header: {line!r}")
        if section == "generators":
            gens.extend(line.split())
        elif section == "relators":
            for tok in line.split():
                if tok != "(none)":
                    relators.append(tok)
        elif section == "mode":
            if mode is not None:
                raise PresentationError("mode specified twice")
            mode = line.strip()
        else:  # rules
            if "->" not in line:
                raise PresentationError(f"rule line {line!r} lacks '->'")
            lhs, _, rhs = line.partition("->")
            rules.append((lhs.strip(), rhs.strip()))
    if mode is None:
        raise PresentationError("missing mode: section")
    return GroupPresentation(
        generators=tuple(gens),
        relators=tuple(relators),
        reduction_mode=mode,
        rewriting_rules=tuple(rules),
    )


# -- Cayley balls ----------------------------------------------------------

class CayleyBall:
    """Ball of a Cayley graph, enumerated breadth-first.

    ``elements`` are canonical normal-form words sorted by (length,
    generator-order lexicographic); element 0 is the identity.  ``adjacency``
    maps each element index and alphabet letter to the index of the product
    when it stays inside the ball.  The ball is the canonical-naming authority
    for its presentation: :meth:`name` returns a run-stable word for any
    product, falling back to an oracle-checked overflow registry outside the
    ball, so chain arithmetic stays exact.
    """

    def __init__(self, presentation: GroupPresentation, radius: int):
        self.presentation = presentation
        self.radius = radius
        self.elements: list[str] = [IDENTITY]
        self.index: dict[str, int] = {IDENTITY: 0}
        self.distances: list[int] = [0]
        self.adjacency: list[dict[str, int]] = [{}]
        self._buckets: dict[tuple, list[int]] = {}
        self._registry: dict[tuple, list[str]] = {}
        self._name_cache: dict[str, str] = {}
        self._lock = threading.Lock()

    # construction helpers -------------------------------------------------

    def _bucket_key(self, word: str) -> tuple:
        if self.presentation._abelian_zero:
            return self.presentation.exponent_vector(word)
        return ()

    def _add_element(self, word: str, dist: int) -> int:
        idx = len(self.elements)
        self.elements.append(word)
        self.index[word] = idx
        self.distances.append(dist)
        self.adjacency.append({})
        if self.presentation.reduction_mode == "dehn":
            self._buckets.setdefault(self._bucket_key(word), []).append(idx)
        return idx

    # lookups ---------------------------------------------------------------

    def canonical_index(self, word: str) -> int | None:
        """Index of the element represented by ``word``, or None if outside."""
        pres = self.presentation
        w = pres.normal(word)
        if pres.reduction_mode != "dehn":
            return self.index.get(w)
        hit = self.index.get(w)
        if hit is not None:
            return hit
        for idx in self._buckets.get(self._bucket_key(w), ()):
            if pres.is_identity(invert(self.elements[idx]) + w):
                return idx
        return None

    def name(self, word: str) -> str:
        """Run-stable canonical name, valid beyond the ball via the registry."""
        cached = self._name_cache.get(word)
        if cached is not None:
            return cached
        pres = self.presentation
        w = pres.normal(word)
        if pres.reduction_mode != "dehn":
            self._name_cache[word] = w
            return w
        idx = self.canonical_index(w)
        if idx is not None:
            out = self.elements[idx]
        else:
            key = self._bucket_key(w)
            with self._lock:
                out = None
                for reg in self._registry.get(key, ()):
                    if pres.is_identity(invert(reg) + w):
                        out = reg
                        break
                if out is None:
                    self._registry.setdefault(key, []).append(w)
                    out = w
        self._name_cache[word] = out
        return out

    def mul(self, x: str, y: str) -> str:
        return self.name(x + y)

    def mul_index(self, x: str, y: str) -> int:
        idx = self.canonical_index(x + y)
        if idx is None:
            raise OutOfBallError(f"product of {x!r} and {y!r} left the ball")
        return idx

    def distance_of(self, word: str) -> int:
        idx = self.canonical_index(word)
        if idx is None:
            raise OutOfBallError(f"{word!r} is outside the radius-{self.radius} ball")
        return self.distances[idx]

    # structure -------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def sphere_offsets(self) -> list[int]:
        offsets = [0] * (self.radius + 2)
        for d in self.distances:
            offsets[d + 1] += 1
        for r in range(1, self.radius + 2):
            offsets[r] += offsets[r - 1]
        return offsets

    def sphere_sizes(self) -> list[int]:
        off = self.sphere_offsets
        return [off[r + 1] - off[r] for r in range(self.radius + 1)]

    def size_within(self, r: int) -> int:
        """Number of elements at distance <= r (a prefix of ``elements``)."""
        if r >= self.radius:
            return len(self.elements)
        return self.sphere_offsets[r + 1]

    def indices_within(self, r: int) -> range:
        return range(self.size_within(r))


def ball(presentation: GroupPresentation, radius: int,
         cap: int = DEFAULT_BALL_CAP) -> CayleyBall:
    """Breadth-first ball enumeration with normal-form deduplication.

    Layers are exact word-metric spheres; canonical words are shortlex-least
    geodesics (in dehn mode they are assigned here via the triviality oracle).
    Raises :class:`BallCapError` when the element count would exceed ``cap``.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    pres = presentation
    b = CayleyBall(pres, radius)
    alphabet = pres.alphabet
    dehn = pres.reduction_mode == "dehn"
    table = pres._dehn_table if dehn else None
    lens = pres._dehn_lens if dehn else ()

    def record(i: int, letter: str, j: int) -> None:
        b.adjacency[i][letter] = j
        b.adjacency[j][letter.swapcase()] = i

    layer = [0]
    for n in range(radius):
        next_layer: list[int] = []
        for i in layer:
            w = b.elements[i]
            for letter in alphabet:
                if w and w[-1] == letter.swapcase():
                    record(i, letter, b.index[w[:-1]])
                    continue
                cand = w + letter
                if not dehn:
                    nf = pres.normal(cand)
                    j = b.index.get(nf)
                    if j is None:
                        if len(nf) != n + 1:
                            raise AssertionError(
                                f"normal form {nf!r} of {cand!r} skipped a BFS layer"
                            )
                        j = b._add_element(nf, n + 1)
                        next_layer.append(j)
                else:
                    reducible = any(
                        cand[k : k + L] in table
                        for L in lens
                        for k in range(len(cand) - L + 1)
                    )
                    j = b.canonical_index(cand)
                    if j is None:
                        if reducible:
                            raise AssertionError(
                                f"Dehn-reducible candidate {cand!r} not found in ball"
                            )
                        j = b._add_element(cand, n + 1)
                        next_layer.append(j)
                record(i, letter, j)
                if len(b.elements) > cap:
                    raise BallCapError(
                        f"ball exceeded the {cap}-element cap at radius {n + 1}"
                    )
        layer = next_layer
    # outermost layer: record edges that stay inside the ball
    for i in layer:
        w = b.elements[i]
        for letter in alphabet:
            if letter in b.adjacency[i]:
                continue
            j = b.canonical_index(w + letter)
            if j is not None:
                record(i, letter, j)
    return b


def word_distance(x: str, y: str, presentation: GroupPresentation, r_max: int,
                  cayley_ball: CayleyBall | None = None) -> int:
    """Word-metric distance d(x, y), exact up to ``r_max``.

    Free and rewriting modes read the geodesic normal-form length; dehn mode
    locates x^-1 y in a ball (built on demand when none is supplied).
    """
    presentation.check_word(x)
    presentation.check_word(y)
    z = invert(x) + y
    if presentation.has_geodesic_normal_forms:
        d = len(presentation.normal(z))
        if d > r_max:
            raise DistanceRangeError(f"d({x!r},{y!r}) = {d} exceeds r_max = {r_max}")
        return d
    b = cayley_ball
    if b is None or b.radius < r_max:
        b = ball(presentation, r_max)
    idx = b.canonical_index(z)
    if idx is None:
        raise DistanceRangeError(f"d({x!r},{y!r}) exceeds r_max = {r_max}")
    d = b.distances[idx]
    if d > r_max:
        raise DistanceRangeError(f"d({x!r},{y!r}) = {d} exceeds r_max = {r_max}")
    return d
