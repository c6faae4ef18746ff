"""Closed oriented 3-manifold descriptions and their fundamental groups.

Supported families: lens spaces, Brieskorn homology spheres, plumbings
along forests, integral surgery on torus knots, connected sums,
S^2 x S^1, and double branched covers of links given by PD codes.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod

from .errors import InvalidParams, UnsupportedDescription
from .grpres import (
    Presentation,
    Word,
    abelianization,
    commutator_word,
    extended_gcd,
    integer_det,
    invariant_factors,
    pairwise_coprime,
)


class ManifoldDesc:
    """Base class; concrete variants are the frozen dataclasses below."""

    kind = "abstract"

    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Lens(ManifoldDesc):
    p: int
    q: int = 1
    kind = "lens"

    def __post_init__(self):
        if self.p < 1 or gcd(self.p, self.q) != 1:
            raise InvalidParams(f"L({self.p},{self.q}) needs p >= 1 and gcd(p,q) = 1")

    def label(self):
        return f"L({self.p},{self.q})"


@dataclass(frozen=True)
class S2xS1(ManifoldDesc):
    kind = "s2xs1"

    def label(self):
        return "S2xS1"


@dataclass(frozen=True)
class Brieskorn(ManifoldDesc):
    a: tuple
    kind = "brieskorn"

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if len(a) != 3 or min(a) < 2 or not pairwise_coprime(a):
            raise InvalidParams(f"Brieskorn exponents {a} must be >= 2 and pairwise coprime")

    def label(self):
        return "Sigma(%d,%d,%d)" % self.a


@dataclass(frozen=True)
class PlumbingTree(ManifoldDesc):
    """Plumbing of disk bundles over spheres along a forest.

    ``weights[v]`` is the Euler number of vertex v; ``edges`` are pairs of
    vertex indices.
    """

    weights: tuple
    edges: tuple = ()
    kind = "plumbing"

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        e = tuple(tuple(sorted((int(a), int(b)))) for a, b in self.edges)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "edges", tuple(sorted(e)))
        n = len(w)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in e:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise InvalidParams(f"bad plumbing edge {(a, b)}")
            ra, rb = find(a), find(b)
            if ra == rb:
                raise InvalidParams("plumbing graph must be a forest")
            parent[ra] = rb

    def degree(self, v: int) -> int:
        return sum(v in e for e in self.edges)

    def neighbors(self, v: int) -> list[int]:
        return [b if a == v else a for a, b in self.edges if v in (a, b)]

    def intersection_matrix(self) -> list[list[int]]:
        n = len(self.weights)
        Q = [[0] * n for _ in range(n)]
        for v, m in enumerate(self.weights):
            Q[v][v] = m
        for a, b in self.edges:
            Q[a][b] = Q[b][a] = -1
        return Q

    def components(self) -> list[PlumbingTree]:
        n = len(self.weights)
        seen: set[int] = set()
        out = []
        for start in range(n):
            if start in seen:
                continue
            comp, stack = [], [start]
            seen.add(start)
            while stack:
                v = stack.pop()
                comp.append(v)
                for u in self.neighbors(v):
                    if u not in seen:
                        seen.add(u)
                        stack.append(u)
            comp.sort()
            idx = {v: i for i, v in enumerate(comp)}
            out.append(PlumbingTree(
                tuple(self.weights[v] for v in comp),
                tuple((idx[a], idx[b]) for a, b in self.edges if a in idx),
            ))
        return out

    def label(self):
        return f"Plumbing(weights={list(self.weights)}, edges={[list(e) for e in self.edges]})"


@dataclass(frozen=True)
class SurgeryOnTorusKnot(ManifoldDesc):
    r: int
    s: int
    n: int
    kind = "surgery_torus_knot"

    def __post_init__(self):
        if self.r < 1 or self.s < 1 or gcd(self.r, self.s) != 1:
            raise InvalidParams("torus knot T(r,s) needs coprime r, s >= 1")

    def is_unknot(self) -> bool:
        return min(self.r, self.s) == 1

    def label(self):
        return f"S3_{self.n}(T({self.r},{self.s}))"


@dataclass(frozen=True)
class ConnectedSum(ManifoldDesc):
    parts: tuple
    kind = "connected_sum"

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise InvalidParams("empty connected sum")

    def label(self):
        return " # ".join(p.label() for p in self.parts)


@dataclass(frozen=True)
class DoubleBranchedCover(ManifoldDesc):
    diagram: object  # linkdiag.PDDiagram
    kind = "double_cover"

    def label(self):
        return f"Sigma2({list(map(list, self.diagram.crossings))})"


def sphere() -> Lens:
    return Lens(1, 0)


# -- fundamental groups -----------------------------------------------------

def seifert_invariants(a) -> tuple[int, tuple[int, int, int]]:
    """(b0, (b1, b2, b3)) with a1 a2 a3 (sum b_i/a_i - b0) = 1, 0 < b_i < a_i."""
    a = tuple(a)
    N = prod(a)
    bs = []
    for ai in a:
        Ai = N // ai
        g, x, _ = extended_gcd(Ai % ai, ai)
        if g != 1:
            raise InvalidParams("Brieskorn exponents must be pairwise coprime")
        bs.append(x % ai)
    total = sum(b * (N // ai) for b, ai in zip(bs, a))
    b0, rem = divmod(total - 1, N)
    assert rem == 0
    return b0, tuple(bs)


def torus_knot_meridian_exponents(r: int, s: int) -> tuple[int, int]:
    """(u, v) with u*s + v*r = 1, so x^u y^v abelianizes to the generator."""
    g, u, v = extended_gcd(s, r)
    assert g == 1
    return u, v


def pi1(desc: ManifoldDesc) -> Presentation:
    if isinstance(desc, Lens):
        a = Word.gen(0)
        return Presentation(1, [a ** desc.p], {"core": a}, ("a",))
    if isinstance(desc, S2xS1):
        return Presentation(1, [], {"core": Word.gen(0)}, ("a",))
    if isinstance(desc, Brieskorn):
        b0, bs = seifert_invariants(desc.a)
        x = [Word.gen(i) for i in range(3)]
        h = Word.gen(3)
        rels = [commutator_word(h, xi) for xi in x]
        rels += [xi ** ai * h ** bi for xi, ai, bi in zip(x, desc.a, bs)]
        rels.append(x[0] * x[1] * x[2] * h ** b0)
        marked = {f"x{i + 1}": xi for i, xi in enumerate(x)}
        marked["fiber"] = h
        return Presentation(4, rels, marked, ("x1", "x2", "x3", "h"))
    if isinstance(desc, PlumbingTree):
        n = len(desc.weights)
        g = [Word.gen(v) for v in range(n)]
        rels = [commutator_word(g[a], g[b]) for a, b in desc.edges]
        for v, m in enumerate(desc.weights):
            w = g[v] ** m
            for u in desc.neighbors(v):
                w = w * g[u].inverse()
            rels.append(w)
        marked = {f"meridian{v}": g[v] for v in range(n)}
        return Presentation(n, rels, marked, tuple(f"g{v}" for v in range(n)))
    if isinstance(desc, SurgeryOnTorusKnot):
        r, s, n = desc.r, desc.s, desc.n
        x, y = Word.gen(0), Word.gen(1)
        u, v = torus_knot_meridian_exponents(r, s)
        mu = x ** u * y ** v
        lam = x ** r * mu ** (-r * s)
        rels = [x ** r * y ** (-s), mu ** n * lam]
        return Presentation(2, rels, {"meridian": mu, "longitude": lam}, ("x", "y"))
    if isinstance(desc, ConnectedSum):
        P = pi1(desc.parts[0])
        for i, part in enumerate(desc.parts[1:], start=1):
            P = P.free_product(pi1(part), prefix=f"s{i}.")
        return P
    raise UnsupportedDescription(f"no presentation for {type(desc).__name__}")


def torus_knot_exterior(r: int, s: int) -> Presentation:
    """Knot group <x, y | x^r y^-s> with marked meridian and longitude."""
    x, y = Word.gen(0), Word.gen(1)
    u, v = torus_knot_meridian_exponents(r, s)
    mu = x ** u * y ** v
    lam = x ** r * mu ** (-r * s)
    return Presentation(2, [x ** r * y ** (-s)], {"meridian": mu, "longitude": lam},
                        ("x", "y"))


def lens_knot_exterior(p: int) -> Presentation:
    """Complement of the core of one Heegaard solid torus of L(p, q).

    It is a solid torus with group Z = <a>; the meridian of the removed
    core is a^p.
    """
    a = Word.gen(0)
    return Presentation(1, [], {"meridian": a ** p, "core": a}, ("a",))


# -- first homology ---------------------------------------------------------

def h1(desc: ManifoldDesc) -> tuple[list[int], int]:
    """(torsion invariant factors, betti number) of H_1(Y; Z)."""
    if isinstance(desc, DoubleBranchedCover):
        from .linkdiag import goeritz_matrix
        G = goeritz_matrix(desc.diagram)
        if not G:
            return [], 0
        diag, n = invariant_factors(G)
        return [d for d in diag if d > 1], n - len(diag)
    if isinstance(desc, ConnectedSum):
        tors, betti = [], 0
        for part in desc.parts:
            t, b = h1(part)
            tors += t
            betti += b
        return _invariant_form(tors), betti
    return abelianization(pi1(desc))


def _invariant_form(orders: list[int]) -> list[int]:
    if not orders:
        return []
    M = [[o if i == j else 0 for j in range(len(orders))] for i, o in enumerate(orders)]
    diag, _ = invariant_factors(M)
    return [d for d in diag if d > 1]


def h1_order(desc: ManifoldDesc) -> int:
    """|H_1(Y; Z)|, with 0 standing for an infinite group."""
    torsion, betti = h1(desc)
    return 0 if betti else prod(torsion)


def z2_rank(desc: ManifoldDesc) -> int:
    """Dimension of H_1(Y; Z/2), the length of a class vector c."""
    torsion, betti = h1(desc)
    return betti + sum(1 for t in torsion if t % 2 == 0)


def plumbing_det(desc: PlumbingTree) -> int:
    return abs(integer_det(desc.intersection_matrix()))


# -- JSON -------------------------------------------------------------------

def from_json(obj: dict) -> ManifoldDesc:
    t = obj.get("type")
    if t == "lens":
        return Lens(int(obj["p"]), int(obj.get("q", 1)))
    if t == "s2xs1":
        return S2xS1()
    if t == "brieskorn":
        return Brieskorn(tuple(obj["a"]))
    if t == "plumbing":
        return PlumbingTree(tuple(obj["weights"]), tuple(map(tuple, obj.get("edges", []))))
    if t == "surgery_torus_knot":
        return SurgeryOnTorusKnot(int(obj["r"]), int(obj["s"]), int(obj["n"]))
    if t == "connected_sum":
        return ConnectedSum(tuple(from_json(p) for p in obj["parts"]))
    if t == "double_cover":
        from .linkdiag import PDDiagram
        return DoubleBranchedCover(PDDiagram.from_json(obj["pd"]))
    raise UnsupportedDescription(f"unknown manifold type {t!r}")


def to_json(desc: ManifoldDesc) -> dict:
    if isinstance(desc, Lens):
        return {"type": "lens", "p": desc.p, "q": desc.q}
    if isinstance(desc, S2xS1):
        return {"type": "s2xs1"}
    if isinstance(desc, Brieskorn):
        return {"type": "brieskorn", "a": list(desc.a)}
    if isinstance(desc, PlumbingTree):
        return {"type": "plumbing", "weights": list(desc.weights),
                "edges": [list(e) for e in desc.edges]}
    if isinstance(desc, SurgeryOnTorusKnot):
        return {"type": "surgery_torus_knot", "r": desc.r, "s": desc.s, "n": desc.n}
    if isinstance(desc, ConnectedSum):
        return {"type": "connected_sum", "parts": [to_json(p) for p in desc.parts]}
    if isinstance(desc, DoubleBranchedCover):
        return {"type": "double_cover", "pd": desc.diagram.to_json()}
    raise UnsupportedDescription(type(desc).__name__)
