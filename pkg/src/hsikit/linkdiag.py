"""Planar link diagrams in PD notation, Goeritz determinants, resolutions,
Reidemeister I/II moves and a quasi-alternating certificate search.

A crossing is a 4-tuple of arc labels listed counterclockwise; positions 0
and 2 belong to the under-strand, 1 and 3 to the over-strand.  Diagrams are
treated as unoriented, so a crossing rotated by two positions is the same
crossing.  Corner ``(c, i)`` is the region of the plane between arm ``i`` and
arm ``i + 1`` of crossing ``c``.

Goeritz convention: faces are checkerboard colored and the white faces are
the color class containing corner ``(0, 0)``.  A crossing has sign +1 when
its white corners are ``{0, 2}`` (the corners following an under-arm
counterclockwise), and -1 otherwise.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import prod

from .errors import DisconnectedDiagram, InvalidParams
from .grpres import integer_det, invariant_factors


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


@dataclass(frozen=True)
class PDDiagram:
    crossings: tuple
    free_loops: int = 0

    def __post_init__(self):
        xs = tuple(tuple(int(a) for a in c) for c in self.crossings)
        object.__setattr__(self, "crossings", xs)
        if any(len(c) != 4 for c in xs):
            raise InvalidParams("each crossing needs exactly four arc labels")
        if self.free_loops < 0:
            raise InvalidParams("negative free loop count")
        counts: dict[int, int] = {}
        for c in xs:
            for a in c:
                counts[a] = counts.get(a, 0) + 1
        bad = [a for a, k in counts.items() if k != 2]
        if bad:
            raise InvalidParams(f"arc labels {sorted(bad)} do not appear exactly twice")
        if xs and len(faces(self)) != len(xs) + 1 + len(_graph_components(self)):
            raise InvalidParams("PD code does not describe a planar diagram")

    @classmethod
    def unknot(cls) -> PDDiagram:
        return cls((), 1)

    @classmethod
    def from_json(cls, obj) -> PDDiagram:
        if isinstance(obj, dict):
            return cls(tuple(map(tuple, obj.get("crossings", []))), int(obj.get("free_loops", 0)))
        crossings = tuple(map(tuple, obj))
        return cls(crossings, 0 if crossings else 1)

    def to_json(self):
        if self.free_loops == 0:
            return [list(c) for c in self.crossings]
        return {"crossings": [list(c) for c in self.crossings], "free_loops": self.free_loops}

    def __len__(self) -> int:
        return len(self.crossings)

    def slots(self) -> dict[int, list[tuple[int, int]]]:
        """arc label -> its two (crossing, position) endpoints."""
        out: dict[int, list[tuple[int, int]]] = {}
        for ci, c in enumerate(self.crossings):
            for pos, a in enumerate(c):
                out.setdefault(a, []).append((ci, pos))
        return out

    def n_components(self) -> int:
        uf = _UnionFind()
        for c in self.crossings:
            uf.find(c[0]), uf.find(c[1])
            uf.union(c[0], c[2])
            uf.union(c[1], c[3])
        roots = {uf.find(a) for c in self.crossings for a in c}
        return len(roots) + self.free_loops

    def is_unknot_diagram(self) -> bool:
        return not self.crossings and self.free_loops == 1


def _other_slot(slots, ci, pos):
    a, b = slots
    return b if a == (ci, pos) else a


def faces(D: PDDiagram) -> list[list[tuple[int, int]]]:
    """Faces of the diagram as cyclic lists of corners."""
    sl = D.slots()
    seen = set()
    out = []
    for ci in range(len(D.crossings)):
        for i in range(4):
            if (ci, i) in seen:
                continue
            face = []
            corner = (ci, i)
            while corner not in seen:
                seen.add(corner)
                face.append(corner)
                c, k = corner
                leave = (k + 1) % 4
                corner = _other_slot(sl[D.crossings[c][leave]], c, leave)
            out.append(face)
    return out


def _graph_components(D: PDDiagram) -> list[set[int]]:
    uf = _UnionFind()
    for ci in range(len(D.crossings)):
        uf.find(ci)
    for pair in D.slots().values():
        uf.union(pair[0][0], pair[1][0])
    comps: dict[int, set[int]] = {}
    for ci in range(len(D.crossings)):
        comps.setdefault(uf.find(ci), set()).add(ci)
    return list(comps.values())


def is_connected(D: PDDiagram) -> bool:
    if not D.crossings:
        return D.free_loops <= 1
    return D.free_loops == 0 and len(_graph_components(D)) == 1


def checkerboard(D: PDDiagram) -> tuple[list[list[tuple[int, int]]], list[int]]:
    """Faces and a 2-coloring in which adjacent faces differ; corner (0,0) is white (0)."""
    fs = faces(D)
    face_of = {corner: fi for fi, f in enumerate(fs) for corner in f}
    color = [-1] * len(fs)
    start = face_of[(0, 0)]
    color[start] = 0
    stack = [start]
    while stack:
        fi = stack.pop()
        for c, i in fs[fi]:
            # corners (c, i +- 1) share an arm with (c, i), so they lie across an edge
            for j in ((i + 1) % 4, (i - 1) % 4):
                g = face_of[(c, j)]
                if color[g] < 0:
                    color[g] = 1 - color[fi]
                    stack.append(g)
                elif color[g] == color[fi]:
                    raise InvalidParams("diagram faces are not 2-colorable")
    return fs, color


def goeritz_matrix(D: PDDiagram) -> list[list[int]]:
    """Reduced Goeritz matrix (last white face deleted)."""
    if not is_connected(D):
        raise DisconnectedDiagram("determinant needs a connected diagram")
    if not D.crossings:
        return []
    fs, color = checkerboard(D)
    face_of = {corner: fi for fi, f in enumerate(fs) for corner in f}
    white = [fi for fi in range(len(fs)) if color[fi] == 0]
    index = {fi: k for k, fi in enumerate(white)}
    k = len(white)
    G = [[0] * k for _ in range(k)]
    for ci in range(len(D.crossings)):
        wc = [i for i in range(4) if color[face_of[(ci, i)]] == 0]
        eta = 1 if wc == [0, 2] else -1
        f, g = (index[face_of[(ci, i)]] for i in wc)
        if f == g:
            continue
        G[f][g] -= eta
        G[g][f] -= eta
        G[f][f] += eta
        G[g][g] += eta
    return [row[:-1] for row in G[:-1]]


def determinant(D: PDDiagram) -> int:
    """|det| of the reduced Goeritz matrix; 0 when the double cover has b1 > 0."""
    return abs(integer_det(goeritz_matrix(D)))


def fox_determinant(D: PDDiagram) -> int:
    """Determinant from the Fox coloring matrix, independent of the face structure.

    The coloring matrix presents H_1 of the double branched cover plus one
    free summand, so the determinant is the torsion order when exactly one
    free summand remains and 0 otherwise.
    """
    if not D.crossings:
        return 1 if D.free_loops == 1 else 0
    if D.free_loops:
        return 0
    uf = _UnionFind()
    for c in D.crossings:
        for a in c:
            uf.find(a)
        uf.union(c[1], c[3])
    arcs = sorted({uf.find(a) for c in D.crossings for a in c})
    col = {a: k for k, a in enumerate(arcs)}
    M = []
    for c in D.crossings:
        row = [0] * len(arcs)
        row[col[uf.find(c[1])]] += 2
        row[col[uf.find(c[0])]] -= 1
        row[col[uf.find(c[2])]] -= 1
        M.append(row)
    diag, n = invariant_factors(M)
    free = n - len(diag)
    return prod(diag) if free == 1 else 0


# -- rewriting --------------------------------------------------------------

def _rebuild(D: PDDiagram, removed, unions) -> PDDiagram:
    """Drop crossings in ``removed`` after identifying the label pairs in ``unions``."""
    uf = _UnionFind()
    for a, b in unions:
        uf.union(a, b)
    keep = [c for ci, c in enumerate(D.crossings) if ci not in removed]
    used = {uf.find(a) for c in keep for a in c}
    touched = {uf.find(a) for pair in unions for a in pair}
    loops = len(touched - used)
    new = tuple(tuple(uf.find(a) for a in c) for c in keep)
    return canonical_labels(PDDiagram(new, D.free_loops + loops))


def canonical_labels(D: PDDiagram) -> PDDiagram:
    """Renumber arc labels 1..2n in order of first appearance."""
    ren: dict[int, int] = {}
    out = []
    for c in D.crossings:
        out.append(tuple(ren.setdefault(a, len(ren) + 1) for a in c))
    return PDDiagram(tuple(out), D.free_loops)


def resolve_crossing(D: PDDiagram, i: int, r: int) -> PDDiagram:
    """Smooth crossing ``i``; r = 0 joins arms (0,1),(2,3), r = 1 joins (1,2),(3,0)."""
    if not 0 <= i < len(D.crossings):
        raise IndexError(f"crossing {i} out of range")
    if r not in (0, 1):
        raise InvalidParams("resolution must be 0 or 1")
    a, b, c, d = D.crossings[i]
    unions = [(a, b), (c, d)] if r == 0 else [(b, c), (d, a)]
    return _rebuild(D, {i}, unions)


def _straight_unions(D, idx):
    out = []
    for ci in idx:
        c = D.crossings[ci]
        out += [(c[0], c[2]), (c[1], c[3])]
    return out


def r1_sites(D: PDDiagram) -> list[int]:
    return [ci for ci, c in enumerate(D.crossings)
            if any(c[k] == c[(k + 1) % 4] for k in range(4))]


def r2_sites(D: PDDiagram) -> list[tuple[int, int]]:
    """Bigon faces whose one strand is over at both crossings."""
    out = []
    for f in faces(D):
        if len(f) != 2:
            continue
        (x, i), (y, j) = f
        if x != y and (i + 1) % 2 == j % 2:
            out.append((x, y))
    return out


def remove_r1(D: PDDiagram, ci: int) -> PDDiagram:
    c = D.crossings[ci]
    k = next(k for k in range(4) if c[k] == c[(k + 1) % 4])
    return _rebuild(D, {ci}, [(c[(k + 2) % 4], c[(k + 3) % 4])])


def remove_r2(D: PDDiagram, x: int, y: int) -> PDDiagram:
    return _rebuild(D, {x, y}, _straight_unions(D, (x, y)))


def simplify(D: PDDiagram) -> PDDiagram:
    """Greedy Reidemeister I/II removal until neither applies."""
    while True:
        s1 = r1_sites(D)
        if s1:
            D = remove_r1(D, s1[0])
            continue
        s2 = r2_sites(D)
        if s2:
            D = remove_r2(D, *s2[0])
            continue
        return D


def add_r1(D: PDDiagram, label: int, variant: int) -> PDDiagram:
    """Put a kink on arc ``label``; ``variant`` in 0..7 picks loop arms and side."""
    if label not in D.slots():
        raise InvalidParams(f"no arc {label}")
    (c1, p1), (c2, p2) = D.slots()[label]
    top = max(a for c in D.crossings for a in c)
    e1, loop, e2 = top + 1, top + 2, top + 3
    xs = [list(c) for c in D.crossings]
    xs[c1][p1] = e1
    xs[c2][p2] = e2
    k, flip = variant % 4, variant // 4 % 2
    new = [0] * 4
    new[k] = new[(k + 1) % 4] = loop
    new[(k + 2) % 4], new[(k + 3) % 4] = (e1, e2) if not flip else (e2, e1)
    xs.append(new)
    return canonical_labels(PDDiagram(tuple(map(tuple, xs)), D.free_loops))


def face_arcs(D: PDDiagram, face) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Boundary arcs of a face as (start slot, end slot), face on the right."""
    sl = D.slots()
    out = []
    for c, i in face:
        leave = (c, (i + 1) % 4)
        arrive = _other_slot(sl[D.crossings[c][leave[1]]], *leave)
        out.append((leave, arrive))
    return out


def add_r2(D: PDDiagram, face_index: int, k1: int, k2: int, over: bool = True) -> PDDiagram:
    """Push boundary arc k1 of a face across boundary arc k2 of the same face."""
    fs = faces(D)
    arcs = face_arcs(D, fs[face_index])
    if k1 == k2:
        raise InvalidParams("need two distinct boundary arcs")
    (P1, Q1), (P2, Q2) = arcs[k1], arcs[k2]
    xs = [list(c) for c in D.crossings]
    if xs[P1[0]][P1[1]] == xs[P2[0]][P2[1]]:
        raise InvalidParams("both boundary arcs are the same arc")
    top = max(a for c in D.crossings for a in c)
    a1, a2, a3, b1, b2, b3 = range(top + 1, top + 7)
    xs[P1[0]][P1[1]] = a1
    xs[Q1[0]][Q1[1]] = a3
    xs[P2[0]][P2[1]] = b1
    xs[Q2[0]][Q2[1]] = b3
    if over:
        xs += [[b3, a2, b2, a1], [b1, a3, b2, a2]]
    else:
        xs += [[a1, b3, a2, b2], [a3, b2, a2, b1]]
    return canonical_labels(PDDiagram(tuple(map(tuple, xs)), D.free_loops))


def connected_sum(D1: PDDiagram, D2: PDDiagram) -> PDDiagram:
    """Band the first boundary arc of face 0 of each diagram together."""
    if not D1.crossings:
        return D2
    if not D2.crossings:
        return D1
    (P1, Q1) = face_arcs(D1, faces(D1)[0])[0]
    (P2, Q2) = face_arcs(D2, faces(D2)[0])[0]
    off = max(a for c in D1.crossings for a in c)
    n1 = len(D1.crossings)
    xs = [list(c) for c in D1.crossings] + [[a + off for a in c] for c in D2.crossings]
    P2 = (P2[0] + n1, P2[1])
    Q2 = (Q2[0] + n1, Q2[1])
    top = max(a for c in xs for a in c)
    u, v = top + 1, top + 2
    for (c, p), lab in ((P1, u), (Q2, u), (P2, v), (Q1, v)):
        xs[c][p] = lab
    return canonical_labels(PDDiagram(tuple(map(tuple, xs)), 0))


def random_moves(D: PDDiagram, n_moves: int, rng: random.Random) -> PDDiagram:
    """Apply a random sequence of R-I/R-II additions and removals."""
    for _ in range(n_moves):
        choice = rng.randrange(4)
        if choice == 0 and D.crossings:
            labels = sorted(D.slots())
            D = add_r1(D, rng.choice(labels), rng.randrange(8))
        elif choice == 1 and D.crossings:
            fs = faces(D)
            fi = rng.randrange(len(fs))
            arcs = face_arcs(D, fs[fi])
            if len(arcs) < 2:
                continue
            k1, k2 = rng.sample(range(len(arcs)), 2)
            try:
                D = add_r2(D, fi, k1, k2, over=rng.random() < 0.5)
            except InvalidParams:
                continue
        elif choice == 2 and r1_sites(D):
            D = remove_r1(D, rng.choice(r1_sites(D)))
        elif choice == 3 and r2_sites(D):
            D = remove_r2(D, *rng.choice(r2_sites(D)))
    return D


def canonical_key(D: PDDiagram) -> tuple:
    """Relabeling-invariant key: minimum over traversal starts of the relabeled code."""
    if not D.crossings:
        return ((), D.free_loops)
    if len(_graph_components(D)) > 1:
        return (tuple(sorted(D.crossings)), D.free_loops, "split")
    sl = D.slots()
    best = None
    for s in range(len(D.crossings)):
        for rot in (0, 2):
            order, rotation = [s], {s: rot}
            labels: dict[int, int] = {}
            k = 0
            while k < len(order):
                c = order[k]
                k += 1
                for t in range(4):
                    pos = (t + rotation[c]) % 4
                    a = D.crossings[c][pos]
                    if a not in labels:
                        labels[a] = len(labels) + 1
                    c2, p2 = _other_slot(sl[a], c, pos)
                    if c2 not in rotation:
                        rotation[c2] = 2 if p2 >= 2 else 0
                        order.append(c2)
            code = tuple(
                tuple(labels[D.crossings[c][(t + rotation[c]) % 4]] for t in range(4))
                for c in order)
            if best is None or code < best:
                best = code
    return (best, D.free_loops)


# -- quasi-alternating certificates -----------------------------------------

class Unknown:
    """Search gave up; says nothing about the property being false."""

    def __init__(self, reason: str = ""):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Unknown({self.reason!r})"


@dataclass
class QACertificate:
    diagram: PDDiagram
    simplified: PDDiagram
    det: int
    crossing: int | None = None
    det0: int | None = None
    det1: int | None = None
    children: list = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.crossing is None

    def nodes(self):
        yield self
        for ch in self.children:
            yield from ch.nodes()

    def to_json(self) -> dict:
        out = {"pd": self.diagram.to_json(), "det": self.det}
        if self.is_leaf:
            out["leaf"] = "unknot"
        else:
            out.update(crossing=self.crossing, det0=self.det0, det1=self.det1,
                       rule="det L = det L0 + det L1",
                       children=[ch.to_json() for ch in self.children])
        return out


def safe_determinant(D: PDDiagram) -> int:
    try:
        return determinant(D)
    except DisconnectedDiagram:
        return 0


def certify_quasi_alternating(D: PDDiagram, depth_limit: int = 64):
    """Depth-first search for a QA certificate; returns QACertificate or Unknown."""
    memo: dict[tuple, QACertificate | None] = {}

    def search(E: PDDiagram, depth: int):
        S = simplify(E)
        key = canonical_key(S)
        if key in memo:
            hit = memo[key]
            return None if hit is None else _rehome(hit, E, S)
        if S.is_unknot_diagram():
            cert = QACertificate(E, S, 1)
            memo[key] = cert
            return cert
        memo[key] = None  # guards against revisiting while in progress
        d = safe_determinant(S)
        if d == 0 or depth <= 0:
            return None
        for i in range(len(S.crossings)):
            L0, L1 = resolve_crossing(S, i, 0), resolve_crossing(S, i, 1)
            d0, d1 = safe_determinant(L0), safe_determinant(L1)
            if d0 < 1 or d1 < 1 or d0 + d1 != d:
                continue
            c0 = search(L0, depth - 1)
            if c0 is None:
                continue
            c1 = search(L1, depth - 1)
            if c1 is None:
                continue
            cert = QACertificate(E, S, d, i, d0, d1, [c0, c1])
            memo[key] = cert
            return cert
        return None

    try:
        cert = search(D, depth_limit)
    except RecursionError:
        return Unknown("recursion limit")
    return cert if cert is not None else Unknown("no certificate found")


def _rehome(cert: QACertificate, E: PDDiagram, S: PDDiagram) -> QACertificate:
    """Reuse a memoized certificate for a diagram with the same simplified key."""
    if cert.is_leaf:
        return QACertificate(E, S, 1)
    # crossing indices refer to cert.simplified, so keep that diagram as the node's
    return QACertificate(E, cert.simplified, cert.det, cert.crossing,
                         cert.det0, cert.det1, cert.children)


def verify_certificate(cert: QACertificate) -> bool:
    """Independent check: Fox-matrix determinants and fresh resolutions at every node."""
    for node in cert.nodes():
        if canonical_key(simplify(node.diagram)) != canonical_key(node.simplified):
            return False
        d = fox_determinant(node.diagram)
        if node.is_leaf:
            if not node.simplified.is_unknot_diagram() or d != 1:
                return False
            continue
        if fox_determinant(node.simplified) != d or d != node.det:
            return False
        kids = [resolve_crossing(node.simplified, node.crossing, r) for r in (0, 1)]
        for kid, child in zip(kids, node.children):
            if canonical_key(kid) != canonical_key(child.diagram):
                return False
        d0, d1 = (fox_determinant(k) for k in kids)
        if (d0, d1) != (node.det0, node.det1) or d0 < 1 or d1 < 1 or d0 + d1 != d:
            return False
    return True


# -- standard diagrams ------------------------------------------------------

TREFOIL = PDDiagram(((1, 5, 2, 4), (3, 1, 4, 6), (5, 3, 6, 2)))
FIGURE_EIGHT = PDDiagram(((4, 2, 5, 1), (8, 6, 1, 5), (6, 3, 7, 4), (2, 7, 3, 8)))
HOPF = PDDiagram(((4, 1, 3, 2), (2, 3, 1, 4)))
UNKNOT = PDDiagram.unknot()

STANDARD = {"unknot": UNKNOT, "hopf": HOPF, "trefoil": TREFOIL, "figure_eight": FIGURE_EIGHT}
