"""Words, finite presentations, Smith normal form and abelianization."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .errors import InvalidParams, UnknownMarkedWord

GENERATOR_NAMES = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True, init=False)
class Word:
    """A freely reduced word: a tuple of (generator index, +1/-1) letters."""

    letters: tuple

    def __init__(self, letters=()):
        out: list[tuple[int, int]] = []
        for g, e in letters:
            if e not in (1, -1):
                raise InvalidParams(f"letter exponent must be +-1, got {e}")
            if g < 0:
                raise InvalidParams("negative generator index")
            if out and out[-1][0] == g and out[-1][1] == -e:
                out.pop()
            else:
                out.append((int(g), int(e)))
        object.__setattr__(self, "letters", tuple(out))

    @classmethod
    def gen(cls, g: int, power: int = 1) -> Word:
        e = 1 if power >= 0 else -1
        return cls([(g, e)] * abs(power))

    @classmethod
    def from_ints(cls, seq) -> Word:
        """Signed 1-based generator indices: [1, -2] means a B."""
        letters = []
        for s in seq:
            s = int(s)
            if s == 0:
                raise InvalidParams("0 is not a letter")
            letters.append((abs(s) - 1, 1 if s > 0 else -1))
        return cls(letters)

    @classmethod
    def parse(cls, text: str) -> Word:
        """Lowercase letter = generator, uppercase = inverse (``"abAB"``)."""
        letters = []
        for ch in text.replace(" ", ""):
            idx = GENERATOR_NAMES.find(ch.lower())
            if idx < 0:
                raise InvalidParams(f"bad generator {ch!r}")
            letters.append((idx, 1 if ch.islower() else -1))
        return cls(letters)

    def to_ints(self) -> list[int]:
        return [(g + 1) * e for g, e in self.letters]

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def inverse(self) -> Word:
        return Word([(g, -e) for g, e in reversed(self.letters)])

    def __pow__(self, n: int) -> Word:
        base = self if n >= 0 else self.inverse()
        return Word(base.letters * abs(n))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def exponent_sums(self, n: int) -> list[int]:
        v = [0] * n
        for g, e in self.letters:
            v[g] += e
        return v

    def shift(self, k: int) -> Word:
        return Word([(g + k, e) for g, e in self.letters])

    def substitute(self, images) -> Word:
        """Replace generator g by the word images[g]."""
        out = Word()
        for g, e in self.letters:
            out = out * (images[g] if e == 1 else images[g].inverse())
        return out

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.letters:
            if g >= len(GENERATOR_NAMES):
                parts.append(f"x{g}^{e}")
            else:
                parts.append(GENERATOR_NAMES[g] if e == 1 else GENERATOR_NAMES[g].upper())
        return "".join(parts)


def commutator_word(a: Word, b: Word) -> Word:
    return a * b * a.inverse() * b.inverse()


@dataclass(frozen=True)
class Presentation:
    n_generators: int
    relators: tuple = ()
    marked: dict = field(default_factory=dict, compare=False)
    names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(self.relators))
        for w in list(self.relators) + list(self.marked.values()):
            if w.max_generator() >= self.n_generators:
                raise InvalidParams("letter refers to a missing generator")

    def relation_matrix(self) -> list[list[int]]:
        return [r.exponent_sums(self.n_generators) for r in self.relators]

    def marked_word(self, name: str) -> Word:
        try:
            return self.marked[name]
        except KeyError:
            raise UnknownMarkedWord(name) from None

    def free_product(self, other: Presentation, prefix: str = "") -> Presentation:
        k = self.n_generators
        marked = dict(self.marked)
        for name, w in other.marked.items():
            marked[prefix + name] = w.shift(k)
        return Presentation(
            k + other.n_generators,
            self.relators + tuple(r.shift(k) for r in other.relators),
            marked,
            tuple(self.names) + tuple(other.names),
        )

    def with_relators(self, extra) -> Presentation:
        return Presentation(self.n_generators, self.relators + tuple(extra),
                            dict(self.marked), self.names)


def quotient_by_square(P: Presentation, mu) -> Presentation:
    """Append the relator mu^2, where mu names (or is) a marked word."""
    if isinstance(mu, str):
        w = P.marked_word(mu)
    else:
        if mu not in P.marked.values():
            raise UnknownMarkedWord(str(mu))
        w = mu
    return P.with_relators([w ** 2])


# -- Smith normal form ------------------------------------------------------

def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M):
    """Return (D, U, V) with U*M*V = D, D diagonal with d1 | d2 | ... >= 0.

    Python integers throughout; the pivot is the smallest nonzero entry
    (in absolute value) of the remaining block.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, k):  # row_dst += k * row_src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):  # col_dst += k * col_src
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n)
                   if A[i][j] != 0]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        dirty = True
            if not dirty:
                # divisibility: pivot must divide the rest of the block
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if A[i][j] % A[t][t]), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                dirty = True
            # move the new smallest entry of row/col t into the pivot
            cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, pi, pj = min(cand)
            swap_rows(t, pi)
            swap_cols(t, pj)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return A, U, V


def invariant_factors(M) -> tuple[list[int], int]:
    """Nonzero diagonal of the SNF, and the number of columns n."""
    if not M:
        return [], 0
    D, _, _ = smith_normal_form(M)
    n = len(M[0])
    diag = [D[i][i] for i in range(min(len(D), n)) if D[i][i] != 0]
    return diag, n


def abelianization(P: Presentation) -> tuple[list[int], int]:
    """(torsion invariant factors > 1, betti number) of P's abelianization."""
    M = P.relation_matrix()
    if not M:
        return [], P.n_generators
    diag, n = invariant_factors(M)
    torsion = [d for d in diag if d > 1]
    return torsion, n - len(diag)


def integer_det(M) -> int:
    """Bareiss fraction-free determinant."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def pairwise_coprime(nums) -> bool:
    nums = list(nums)
    return all(gcd(a, b) == 1 for i, a in enumerate(nums) for b in nums[i + 1:])
