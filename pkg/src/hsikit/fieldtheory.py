"""Holonomy-level correspondences of elementary cobordisms between surfaces
with one boundary component, their composition, Cerf moves, and the
generalized intersection problem of a closed chain.

Conventions.  A level of genus g carries holonomies ``(A_1, B_1, ..., A_g,
B_g)``; generator ``2i`` is ``A_{i+1}`` and ``2i + 1`` is ``B_{i+1}`` (pairs
are indexed from 0 in code).  A Z/2 class on a piece is stored as a vector of
2g sign bits at the piece's source level: bit j set means generator j is
negated before the piece acts.  The class dual to the curve alpha_i flips
B_i and the class dual to beta_i flips A_i.

Everything is evaluated on the flat slice theta = 0, where a boundary
rotation acts trivially; off that slice it conjugates by exp(alpha * theta).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    GenusMismatch,
    InvalidParams,
    MoveNotApplicable,
    NoConvergence,
    OpenChain,
    SamplingFailure,
    UnsupportedCobordism,
)
from .grpres import Presentation, Word, commutator_word, extended_gcd
from .repvar import (
    TwistedRepProblem,
    evaluate_word,
    kind_histogram,
    sample_points,
    solve_numeric,
)
from .su2 import SU2Element, Su2Vector, exp_su2, log_su2

HOLONOMY_TOL = 1e-9


def A(i: int) -> int:
    return 2 * i


def B(i: int) -> int:
    return 2 * i + 1


# -- holonomy tuples --------------------------------------------------------

@dataclass(frozen=True)
class HolonomyTuple:
    theta: Su2Vector
    pairs: tuple  # ((A_1, B_1), ...)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        if self.theta.norm() >= math.pi * math.sqrt(2.0):
            raise InvalidParams("|theta| must be below pi*sqrt(2)")
        if exp_su2(self.theta).distance(boundary_product(self.pairs)) > HOLONOMY_TOL:
            raise InvalidParams("exp(theta) differs from the product of commutators")

    @classmethod
    def from_pairs(cls, pairs) -> HolonomyTuple:
        """theta is recovered as log of the product of commutators."""
        return cls(log_su2(boundary_product(pairs)), pairs)

    @classmethod
    def from_generators(cls, gens) -> HolonomyTuple:
        gens = list(gens)
        return cls.from_pairs([(gens[2 * i], gens[2 * i + 1]) for i in range(len(gens) // 2)])

    @property
    def genus(self) -> int:
        return len(self.pairs)

    def generators(self) -> list[SU2Element]:
        return [g for p in self.pairs for g in p]

    def conjugate(self, g: SU2Element) -> HolonomyTuple:
        from .su2 import adjoint
        return HolonomyTuple(adjoint(g, self.theta),
                             [(a.conjugate_by(g), b.conjugate_by(g)) for a, b in self.pairs])

    def distance(self, other: HolonomyTuple) -> float:
        if self.genus != other.genus:
            return math.inf
        d = (self.theta + (-other.theta)).euclidean
        for x, y in zip(self.generators(), other.generators()):
            d = max(d, x.distance(y))
        return d


def boundary_product(pairs) -> SU2Element:
    out = SU2Element.identity()
    for a, b in pairs:
        out = out * a * b * a.inverse() * b.inverse()
    return out


def random_flat(genus: int, rng: np.random.Generator) -> HolonomyTuple:
    """Flat tuple with commuting pairs; generic enough for negative samples."""
    pairs = []
    for _ in range(genus):
        axis = rng.standard_normal(3)
        a, b = rng.uniform(0, 2 * math.pi, 2)
        pairs.append((exp_su2(Su2Vector.from_norm(axis, a)),
                      exp_su2(Su2Vector.from_norm(axis, b))))
    return HolonomyTuple(Su2Vector(), pairs)


# -- elementary correspondences --------------------------------------------

Signed = tuple  # (sign, Word)


def _eval_signed(w: Word, entries) -> Signed:
    sign, letters = 1, []
    for g, e in w:
        s, img = entries[g]
        sign *= s
        letters.extend(img.letters if e == 1 else img.inverse().letters)
    return sign, Word(letters)


def _identity_images(genus: int) -> tuple:
    return tuple((1, Word.gen(j)) for j in range(2 * genus))


@dataclass(frozen=True)
class CorrespondenceExpr:
    genus: int  # source genus

    functional = True
    kind = "abstract"

    @property
    def target_genus(self) -> int:
        return self.genus

    def signed_images(self) -> tuple:
        """Images of the level generators as (sign, Word); functional kinds only."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SignFlip(CorrespondenceExpr):
    bits: tuple = ()
    kind = "sign_flip"

    def __post_init__(self):
        bits = tuple(int(b) % 2 for b in self.bits) or (0,) * (2 * self.genus)
        if len(bits) != 2 * self.genus:
            raise InvalidParams("sign flip needs 2g bits")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_curves(cls, genus: int, alpha=(), beta=()) -> SignFlip:
        """Class dual to the listed alpha_i / beta_i curves."""
        bits = [0] * (2 * genus)
        for i in alpha:
            bits[B(i)] ^= 1
        for i in beta:
            bits[A(i)] ^= 1
        return cls(genus, tuple(bits))

    def signed_images(self):
        return tuple(((-1) ** b, Word.gen(j)) for j, b in enumerate(self.bits))

    def to_json(self):
        return {"kind": self.kind, "genus": self.genus, "bits": list(self.bits)}


@dataclass(frozen=True)
class BoundaryRotation(CorrespondenceExpr):
    alpha: float = 0.0
    kind = "rotation"

    def signed_images(self):
        return _identity_images(self.genus)

    def to_json(self):
        return {"kind": self.kind, "genus": self.genus, "alpha": self.alpha}


@dataclass(frozen=True)
class WordSubstitution(CorrespondenceExpr):
    images: tuple = ()  # (sign, Word) per generator
    kind = "words"

    def __post_init__(self):
        imgs = tuple(x if isinstance(x, tuple) else (1, x) for x in self.images)
        imgs = tuple((int(sg), w) for sg, w in imgs)
        if len(imgs) != 2 * self.genus:
            raise InvalidParams("need one image per generator")
        for s, w in imgs:
            if s not in (1, -1) or w.max_generator() >= 2 * self.genus:
                raise InvalidParams("bad image word")
        object.__setattr__(self, "images", imgs)

    def signed_images(self):
        return self.images

    def to_json(self):
        return {"kind": self.kind, "genus": self.genus,
                "images": [[s, w.to_ints()] for s, w in self.images]}


@dataclass(frozen=True)
class PathConjugation(CorrespondenceExpr):
    word: Word = Word()
    kind = "conjugate"

    def signed_images(self):
        w = self.word
        return tuple((1, w.inverse() * Word.gen(j) * w) for j in range(2 * self.genus))

    def to_json(self):
        return {"kind": self.kind, "genus": self.genus, "word": self.word.to_ints()}


@dataclass(frozen=True)
class TwoHandle(CorrespondenceExpr):
    """Attach a 2-handle along alpha_k ('a') or beta_k ('b'): that holonomy is eps*I
    and pair k disappears."""

    curve: tuple = ("b", 0)
    eps: int = 1
    kind = "two_handle"
    functional = False

    def __post_init__(self):
        c, k = self.curve
        if c not in ("a", "b") or not 0 <= k < self.genus or self.eps not in (1, -1):
            raise InvalidParams(f"bad 2-handle {self.curve}, eps={self.eps} at genus {self.genus}")

    @property
    def target_genus(self):
        return self.genus - 1

    @property
    def pair(self) -> int:
        return self.curve[1]

    @property
    def generator(self) -> int:
        c, k = self.curve
        return A(k) if c == "a" else B(k)

    def to_json(self):
        return {"kind": self.kind, "genus": self.genus, "curve": list(self.curve),
                "eps": self.eps}


@dataclass(frozen=True)
class OneHandle(CorrespondenceExpr):
    """Insert a pair at ``index`` with A free and B = eps*I (reverse of a beta 2-handle)."""

    eps: int = 1
    index: int = 0
    kind = "one_handle"
    functional = False

    def __post_init__(self):
        if not 0 <= self.index <= self.genus or self.eps not in (1, -1):
            raise InvalidParams("bad 1-handle data")

    @property
    def target_genus(self):
        return self.genus + 1

    def to_json(self):
        return {"kind": self.kind, "genus": self.genus, "eps": self.eps, "index": self.index}


def dehn_twist(genus: int, curve: str, k: int, power: int = 1) -> WordSubstitution:
    """Twist about beta_k: A_k -> A_k B_k; about alpha_k: B_k -> B_k A_k."""
    if not 0 <= k < genus:
        raise InvalidParams(f"no pair {k} at genus {genus}")
    imgs = list(_identity_images(genus))
    a, b = Word.gen(A(k)), Word.gen(B(k))
    if curve == "b":
        imgs[A(k)] = (1, a * b ** power)
    elif curve == "a":
        imgs[B(k)] = (1, b * a ** power)
    else:
        raise InvalidParams(f"unknown curve {curve!r}")
    return WordSubstitution(genus, tuple(imgs))


def correspondence_of(datum: dict) -> CorrespondenceExpr:
    """Correspondence of an elementary cobordism described by a small dict."""
    kind = datum.get("kind")
    g = int(datum.get("genus", 1))
    if kind == "cylinder":
        return SignFlip.from_curves(g, datum.get("alpha", ()), datum.get("beta", ()))
    if kind == "sign_flip":
        return SignFlip(g, tuple(datum.get("bits", ())))
    if kind in ("reparametrization", "rotation"):
        return BoundaryRotation(g, float(datum.get("alpha", 0.0)))
    if kind == "dehn_twist":
        return dehn_twist(g, datum["curve"], int(datum.get("index", 0)),
                          int(datum.get("power", 1)))
    if kind == "path_change":
        # on a torus the slide conjugates the boundary holonomy by A; in higher
        # genus the same formula would leave the flat slice
        if g != 1:
            raise UnsupportedCobordism("path change is modelled on a genus-1 level only")
        a, b = Word.gen(0), Word.gen(1)
        return WordSubstitution(1, ((1, a), (1, a.inverse() * b * a)))
    if kind == "words":
        return WordSubstitution(g, tuple((int(s), Word.from_ints(w)) for s, w in datum["images"]))
    if kind == "conjugate":
        return PathConjugation(g, Word.from_ints(datum.get("word", [])))
    if kind == "two_handle":
        c = datum.get("curve", ["b", 0])
        return TwoHandle(g, (c[0], int(c[1])), int(datum.get("eps", 1)))
    if kind == "one_handle":
        return OneHandle(g, int(datum.get("eps", 1)), int(datum.get("index", 0)))
    raise UnsupportedCobordism(f"unknown elementary cobordism {kind!r}")


# -- chains -----------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    expr: CorrespondenceExpr
    cls: tuple = ()

    def __post_init__(self):
        bits = tuple(int(b) % 2 for b in self.cls) or (0,) * (2 * self.expr.genus)
        if len(bits) != 2 * self.expr.genus:
            raise InvalidParams("class vector must have 2g bits at the source level")
        object.__setattr__(self, "cls", bits)

    @property
    def has_class(self) -> bool:
        return any(self.cls)


@dataclass(frozen=True)
class CobordismChain:
    pieces: tuple

    def __post_init__(self):
        ps = tuple(p if isinstance(p, Piece) else Piece(p) for p in self.pieces)
        object.__setattr__(self, "pieces", ps)
        for p, q in zip(ps, ps[1:]):
            if p.expr.target_genus != q.expr.genus:
                raise GenusMismatch(f"{p.expr.kind} ends at genus {p.expr.target_genus}, "
                                    f"{q.expr.kind} starts at {q.expr.genus}")

    @property
    def source_genus(self) -> int:
        return self.pieces[0].expr.genus if self.pieces else 0

    @property
    def target_genus(self) -> int:
        return self.pieces[-1].expr.target_genus if self.pieces else 0

    @property
    def functional(self) -> bool:
        return all(p.expr.functional for p in self.pieces)

    def __len__(self):
        return len(self.pieces)

    def replace(self, start: int, stop: int, new) -> CobordismChain:
        return CobordismChain(self.pieces[:start] + tuple(new) + self.pieces[stop:])

    def to_json(self) -> list:
        out = []
        for p in self.pieces:
            d = p.expr.to_json()
            d["class"] = list(p.cls)
            out.append(d)
        return out

    @classmethod
    def from_json(cls, obj) -> CobordismChain:
        pieces = []
        for d in obj:
            expr = correspondence_of(d)
            pieces.append(Piece(expr, tuple(d.get("class", ()))))
        return cls(tuple(pieces))


# -- symbolic propagation ---------------------------------------------------

@dataclass
class _State:
    entries: list  # (sign, Word) per generator of the current level
    n_gens: int
    relators: list = field(default_factory=list)  # (Word, sign)
    rotation: float = 0.0


def _step(state: _State, piece: Piece, flat: bool):
    ent = [((-1) ** b * s, w) for (s, w), b in zip(state.entries, piece.cls)]
    expr = piece.expr
    if isinstance(expr, BoundaryRotation):
        state.rotation += expr.alpha
    if expr.functional:
        ent = [_eval_signed(w, ent) if s == 1 else
               (lambda t: (-t[0], t[1]))(_eval_signed(w, ent))
               for s, w in expr.signed_images()]
    elif isinstance(expr, TwoHandle):
        s, w = ent[expr.generator]
        state.relators.append((w, expr.eps * s))
        k = expr.pair
        ent = ent[:A(k)] + ent[B(k) + 1:]
    elif isinstance(expr, OneHandle):
        a, b = state.n_gens, state.n_gens + 1
        state.n_gens += 2
        state.relators.append((Word.gen(b), expr.eps))
        i = expr.index
        ent = ent[:A(i)] + [(1, Word.gen(a)), (1, Word.gen(b))] + ent[A(i):]
    else:
        raise UnsupportedCobordism(expr.kind)
    state.entries = ent
    if flat and ent:
        w = Word()
        for i in range(len(ent) // 2):
            w = w * commutator_word(ent[A(i)][1], ent[B(i)][1])
        if len(w) and (w, 1) not in state.relators:
            state.relators.append((w, 1))


def _propagate(chain: CobordismChain, entries, n_gens: int, flat: bool) -> _State:
    state = _State(list(entries), n_gens)
    for piece in chain.pieces:
        _step(state, piece, flat)
    return state


@dataclass(frozen=True)
class NormalForm:
    rotation: float
    images: tuple

    def __eq__(self, other):
        return (isinstance(other, NormalForm) and self.images == other.images
                and math.isclose(self.rotation, other.rotation, abs_tol=1e-12))


def symbolic_map(chain: CobordismChain) -> NormalForm:
    """Exact composite of a functional chain as signed words in the source generators."""
    if not chain.functional:
        raise InvalidParams("symbolic composition needs functional pieces only")
    g = chain.source_genus
    st = _propagate(chain, _identity_images(g), 2 * g, flat=False)
    return NormalForm(st.rotation, tuple(st.entries))


def fuse(chain: CobordismChain) -> CobordismChain:
    """Single-piece (plus rotation) chain with the same composite; functional only."""
    nf = symbolic_map(chain)
    g = chain.source_genus
    pieces = [Piece(WordSubstitution(g, nf.images))]
    if nf.rotation:
        pieces.append(Piece(BoundaryRotation(g, nf.rotation)))
    return CobordismChain(tuple(pieces))


def generalized_intersections(chain: CobordismChain) -> TwistedRepProblem:
    """Holonomy equations of a chain running from genus 0 to genus 0."""
    if not chain.pieces or chain.source_genus != 0 or chain.target_genus != 0:
        raise OpenChain("chain must start and end at genus 0")
    st = _propagate(chain, [], 0, flat=True)
    names = tuple(f"g{k}" for k in range(st.n_gens))
    P = Presentation(st.n_gens, tuple(w for w, _ in st.relators), {}, names)
    return TwistedRepProblem(P, tuple(st.relators))


# -- evaluation of functional pieces and membership -------------------------

def apply_functional(expr: CorrespondenceExpr, x: HolonomyTuple) -> HolonomyTuple:
    if expr.genus != x.genus:
        raise GenusMismatch(f"expression genus {expr.genus}, tuple genus {x.genus}")
    gens = x.generators()
    if isinstance(expr, BoundaryRotation):
        g = exp_su2(x.theta.scale(expr.alpha))
        out = [h.conjugate_by(g) for h in gens]
        return HolonomyTuple(x.theta, [(out[A(i)], out[B(i)]) for i in range(x.genus)])
    out = [evaluate_word(w, gens) * SU2Element.central(s) for s, w in expr.signed_images()]
    # word maps may conjugate the boundary holonomy (path changes), so recompute theta
    return HolonomyTuple.from_pairs([(out[A(i)], out[B(i)]) for i in range(x.genus)])


def member(expr: CorrespondenceExpr, x: HolonomyTuple, y: HolonomyTuple,
           tol: float = 1e-8) -> bool:
    """Does (x, y) satisfy the defining equations of ``expr``?"""
    if x.genus != expr.genus or y.genus != expr.target_genus:
        raise GenusMismatch("tuple genera do not match the expression")
    if expr.functional:
        return apply_functional(expr, x).distance(y) <= tol
    if (x.theta + (-y.theta)).euclidean > tol:
        return False
    if isinstance(expr, TwoHandle):
        k = expr.pair
        if x.generators()[expr.generator].distance(SU2Element.central(expr.eps)) > tol:
            return False
        rest = x.pairs[:k] + x.pairs[k + 1:]
        return _pairs_close(rest, y.pairs, tol)
    if isinstance(expr, OneHandle):
        i = expr.index
        if y.pairs[i][1].distance(SU2Element.central(expr.eps)) > tol:
            return False
        return _pairs_close(y.pairs[:i] + y.pairs[i + 1:], x.pairs, tol)
    raise UnsupportedCobordism(expr.kind)


def _pairs_close(p, q, tol) -> bool:
    return len(p) == len(q) and all(a.distance(c) <= tol and b.distance(d) <= tol
                                    for (a, b), (c, d) in zip(p, q))


def _membership_problem(chain: CobordismChain, x: HolonomyTuple, y: HolonomyTuple):
    """Unknowns are the 1-handle fibers; x and y enter as constant generators."""
    gx, gy = chain.source_genus, chain.target_genus
    nx = 2 * gx
    st = _propagate(chain, [(1, Word.gen(j)) for j in range(nx)], nx, flat=False)
    n = st.n_gens + 2 * gy
    rels = list(st.relators)
    consts = {j: g for j, g in enumerate(x.generators())}
    for j, ((s, w), val) in enumerate(zip(st.entries, y.generators())):
        cy = st.n_gens + j
        consts[cy] = val
        rels.append((w * Word.gen(cy).inverse(), s))
    P = Presentation(n, tuple(w for w, _ in rels))
    return TwistedRepProblem(P, tuple(rels), consts)


def chain_member(chain: CobordismChain, x: HolonomyTuple, y: HolonomyTuple,
                 tol: float = 1e-8, seed: int = 17) -> bool:
    """Membership in the composite relation of a chain, through its equations."""
    if x.genus != chain.source_genus or y.genus != chain.target_genus:
        raise GenusMismatch("tuple genera do not match the chain")
    if chain.functional:
        return _apply_chain(chain, x).distance(y) <= tol
    if x.theta.euclidean > tol or y.theta.euclidean > tol:
        raise UnsupportedCobordism("relational chains are evaluated on the flat slice only")
    prob = _membership_problem(chain, x, y)
    try:
        solve_numeric(prob, restarts=8, tol=tol, seed=seed)
    except NoConvergence:
        return False
    return True


def sample_relation(chain: CobordismChain, n: int, seed: int = 17,
                    tol: float = 1e-10) -> list[tuple[HolonomyTuple, HolonomyTuple]]:
    """Flat pairs (x, y) in the chain's relation, found with the numerical solver."""
    gx = chain.source_genus
    nx = 2 * gx
    st = _propagate(chain, [(1, Word.gen(j)) for j in range(nx)], nx, flat=False)
    rels = list(st.relators)
    if gx:
        w = Word()
        for i in range(gx):
            w = w * commutator_word(Word.gen(A(i)), Word.gen(B(i)))
        rels.append((w, 1))
    P = Presentation(max(st.n_gens, 1), tuple(r for r, _ in rels))
    prob = TwistedRepProblem(P, tuple(rels))
    out = []
    for images in sample_points(prob, n, seed=seed, tol=tol):
        x = HolonomyTuple.from_generators(images[:nx]) if gx else HolonomyTuple(Su2Vector(), ())
        ys = [evaluate_word(w, images) * SU2Element.central(s) for s, w in st.entries]
        out.append((x, HolonomyTuple(x.theta, [(ys[A(i)], ys[B(i)])
                                                for i in range(len(ys) // 2)])))
    return out


# -- composition check -------------------------------------------------------

def _random_tuple(genus: int, rng: np.random.Generator) -> HolonomyTuple:
    while True:
        pairs = [(SU2Element.random(rng), SU2Element.random(rng)) for _ in range(genus)]
        if boundary_product(pairs).trace() > -1.9:
            return HolonomyTuple.from_pairs(pairs)


@lru_cache(maxsize=32)
def flat_tuples(genus: int, n: int, seed: int = 17) -> tuple[HolonomyTuple, ...]:
    """Solutions of prod [A_i, B_i] = I found by the numerical solver."""
    if genus == 0:
        return (HolonomyTuple(Su2Vector(), ()),) * n
    w = Word()
    for i in range(genus):
        w = w * commutator_word(Word.gen(A(i)), Word.gen(B(i)))
    prob = TwistedRepProblem(Presentation(2 * genus, (w,)), ((w, 1),))
    return tuple(HolonomyTuple.from_generators(g) for g in sample_points(prob, n, seed=seed))


def _apply_chain(chain: CobordismChain, x: HolonomyTuple) -> HolonomyTuple:
    z = x
    for p in chain.pieces:
        z = apply_functional(p.expr, apply_functional(SignFlip(p.expr.genus, p.cls), z))
    return z


def compose_check(chain1: CobordismChain, chain2: CobordismChain, samples: int = 1000,
                  seed: int = 17, tol: float = 1e-8) -> dict:
    """Compare two chains with the same ends: symbolically when both are
    functional, otherwise by membership of sampled flat pairs.

    The symbolic form moves every rotation to the end, which is exact on the
    flat slice; the numerical cross-check therefore uses flat tuples.
    """
    if (chain1.source_genus, chain1.target_genus) != (chain2.source_genus, chain2.target_genus):
        raise GenusMismatch("chains do not have the same ends")
    rng = np.random.default_rng(seed)
    if chain1.functional and chain2.functional:
        equal = symbolic_map(chain1) == symbolic_map(chain2)
        xs = flat_tuples(chain1.source_genus, min(samples, 50), seed)
        n_num = len(xs)
        worst = 0.0
        for x in xs:
            worst = max(worst, _apply_chain(chain1, x).distance(_apply_chain(chain2, x)))
        return {"method": "symbolic", "equal": equal, "numeric_checks": n_num,
                "numeric_max_distance": worst, "numeric_agree": worst <= tol,
                "disagreements": 0 if equal else 1}
    third = max(samples // 3, 1)
    pos1 = sample_relation(chain1, third, seed=seed)
    pos2 = sample_relation(chain2, third, seed=seed + 1)
    if not pos1 and not pos2:
        raise SamplingFailure("no flat pairs found in either relation")
    neg = [(random_flat(chain1.source_genus, rng), random_flat(chain1.target_genus, rng))
           for _ in range(max(samples - len(pos1) - len(pos2), 0))]
    disagreements = 0
    checked = 0
    for x, y in pos1 + pos2 + neg:
        m1 = chain_member(chain1, x, y, tol)
        m2 = chain_member(chain2, x, y, tol)
        checked += 1
        disagreements += m1 != m2
    return {"method": "sampled", "equal": disagreements == 0, "samples": checked,
            "positives": len(pos1) + len(pos2), "disagreements": disagreements}


# -- Cerf moves ------------------------------------------------------------

@dataclass(frozen=True)
class Diffeo:
    """Insert psi then psi^-1 before ``position`` (psi a product of Dehn twists)
    and fuse each into its functional neighbour."""
    position: int
    twists: tuple  # (curve, pair, power)


@dataclass(frozen=True)
class TrivialCylinder:
    position: int
    insert: bool = True


@dataclass(frozen=True)
class BirthDeath:
    position: int
    pair: int = 0
    insert: bool = True


@dataclass(frozen=True)
class CriticalSwitch:
    position: int  # swaps pieces position and position + 1


@dataclass(frozen=True)
class ClassSlide:
    position: int  # moves u from piece position+1 into piece position
    u: tuple


def _twist_chain(genus: int, twists, inverse: bool) -> CobordismChain:
    seq = [dehn_twist(genus, c, k, -p if inverse else p) for c, k, p in twists]
    if inverse:
        seq.reverse()
    return CobordismChain(tuple(Piece(s) for s in seq))


def _fusable(piece: Piece) -> bool:
    return isinstance(piece.expr, (WordSubstitution, SignFlip, PathConjugation))


def _level_genus(chain: CobordismChain, position: int) -> int:
    if position < len(chain.pieces):
        return chain.pieces[position].expr.genus
    return chain.target_genus


def _gf2_matrix(expr: CorrespondenceExpr) -> np.ndarray:
    n = 2 * expr.genus
    M = np.zeros((n, n), dtype=int)
    for j, (_, w) in enumerate(expr.signed_images()):
        M[j] = np.array(w.exponent_sums(n)) % 2
    return M


def _gf2_solve(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve M s = b over GF(2) for invertible M."""
    n = M.shape[0]
    aug = np.concatenate([M % 2, (b % 2)[:, None]], axis=1).astype(int)
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if aug[r, col]), None)
        if piv is None:
            raise MoveNotApplicable("mapping matrix is singular mod 2")
        aug[[row, piv]] = aug[[piv, row]]
        for r in range(n):
            if r != row and aug[r, col]:
                aug[r] ^= aug[row]
        row += 1
    return aug[:, -1]


def transport_back(expr: CorrespondenceExpr, u) -> tuple:
    """t with flip(u) o expr = expr o flip(t), for u at the target level."""
    u = np.array(u, dtype=int) % 2
    if isinstance(expr, (SignFlip, BoundaryRotation, PathConjugation)):
        return tuple(int(v) for v in u)
    if isinstance(expr, WordSubstitution):
        # expr(flip_s x)_j carries sign (-1)^(N s)_j
        return tuple(int(v) for v in _gf2_solve(_gf2_matrix(expr), u))
    if isinstance(expr, TwoHandle):
        k = expr.pair
        return tuple(int(v) for v in np.concatenate([u[:A(k)], [0, 0], u[A(k):]]))
    if isinstance(expr, OneHandle):
        i = expr.index
        if u[B(i)]:
            raise MoveNotApplicable("class would flip the fixed holonomy of the new pair")
        return tuple(int(v) for v in np.concatenate([u[:A(i)], u[B(i) + 1:]]))
    raise MoveNotApplicable(expr.kind)


def _sim_labels(pieces, start):
    labels = list(start)
    fresh = itertools.count(10_000)
    made = []
    for p in pieces:
        e = p.expr
        if isinstance(e, OneHandle):
            lab = next(fresh)
            made.append(lab)
            labels.insert(e.index, lab)
        else:
            made.append(labels.pop(e.pair))
    return labels, made


def _critical_switch(chain: CobordismChain, i: int) -> CobordismChain:
    if i + 1 >= len(chain.pieces):
        raise MoveNotApplicable("need two pieces to switch")
    p, q = chain.pieces[i], chain.pieces[i + 1]
    handles = (OneHandle, TwoHandle)
    if not (isinstance(p.expr, handles) and isinstance(q.expr, handles)):
        raise MoveNotApplicable("critical point switch needs two handles")
    if p.has_class or q.has_class:
        raise MoveNotApplicable("slide classes off the handles before switching")
    g = p.expr.genus
    start = list(range(g))
    final, (lp, lq) = _sim_labels([p, q], start)
    if isinstance(p.expr, OneHandle) and isinstance(q.expr, TwoHandle) and lq == lp:
        raise MoveNotApplicable("attaching spheres are not disjoint")
    # replay in the other order, choosing indices that reach the same final list
    labels = list(start)
    new = []
    for piece, lab in ((q, lq), (p, lp)):
        e = piece.expr
        gen = len(labels)
        if isinstance(e, OneHandle):
            idx = sum(1 for x in final[:final.index(lab)] if x in labels)
            labels.insert(idx, lab)
            new.append(Piece(OneHandle(gen, e.eps, idx)))
        else:
            if lab not in labels:
                raise MoveNotApplicable("handle acts on a pair created by the other")
            idx = labels.index(lab)
            labels.pop(idx)
            new.append(Piece(TwoHandle(gen, (e.curve[0], idx), e.eps)))
    if labels != final:
        raise MoveNotApplicable("switch does not reproduce the pair ordering")
    return chain.replace(i, i + 2, new)


def apply_cerf_move(chain: CobordismChain, move) -> CobordismChain:
    """Rewrite ``chain`` by one of the five Cerf moves; the composite relation is kept."""
    n = len(chain.pieces)
    if isinstance(move, TrivialCylinder):
        i = move.position
        if move.insert:
            if not 0 <= i <= n:
                raise MoveNotApplicable("position out of range")
            g = _level_genus(chain, i)
            return chain.replace(i, i, [Piece(SignFlip(g))])
        if not 0 <= i < n:
            raise MoveNotApplicable("position out of range")
        p = chain.pieces[i]
        if not (p.expr.functional and not p.has_class
                and symbolic_map(CobordismChain((p,))) == symbolic_map(
                    CobordismChain((Piece(SignFlip(p.expr.genus)),)))):
            raise MoveNotApplicable("piece is not a trivial cylinder")
        return chain.replace(i, i + 1, [])
    if isinstance(move, BirthDeath):
        i, k = move.position, move.pair
        if move.insert:
            if not 0 <= i <= n:
                raise MoveNotApplicable("position out of range")
            g = _level_genus(chain, i)
            if not 0 <= k <= g:
                raise MoveNotApplicable("pair index out of range")
            return chain.replace(i, i, [Piece(OneHandle(g, 1, k)),
                                        Piece(TwoHandle(g + 1, ("a", k), 1))])
        if i + 1 >= n:
            raise MoveNotApplicable("no birth-death pair here")
        p, q = chain.pieces[i], chain.pieces[i + 1]
        if (isinstance(p.expr, OneHandle) and isinstance(q.expr, TwoHandle)
                and q.expr.curve == ("a", p.expr.index) and p.expr.eps == 1
                and q.expr.eps == 1 and not p.has_class and not q.has_class):
            return chain.replace(i, i + 2, [])
        raise MoveNotApplicable("pieces are not a cancelling birth-death pair")
    if isinstance(move, CriticalSwitch):
        return _critical_switch(chain, move.position)
    if isinstance(move, ClassSlide):
        i = move.position
        if not 0 <= i < n - 1:
            raise MoveNotApplicable("class slide needs two adjacent pieces")
        p, q = chain.pieces[i], chain.pieces[i + 1]
        if not (p.expr.functional or q.expr.functional):
            raise MoveNotApplicable("one of the two pieces must be a cylinder")
        u = tuple(int(b) % 2 for b in move.u)
        if len(u) != 2 * q.expr.genus:
            raise MoveNotApplicable("class vector has the wrong length")
        t = transport_back(p.expr, u)
        newp = Piece(p.expr, tuple(a ^ b for a, b in zip(p.cls, t)))
        newq = Piece(q.expr, tuple(a ^ b for a, b in zip(q.cls, u)))
        return chain.replace(i, i + 2, [newp, newq])
    if isinstance(move, Diffeo):
        i = move.position
        if not 0 <= i <= n:
            raise MoveNotApplicable("position out of range")
        g = _level_genus(chain, i)
        try:
            psi = _twist_chain(g, move.twists, inverse=False)
        except InvalidParams as e:
            raise MoveNotApplicable(str(e)) from None
        psi_inv = _twist_chain(g, move.twists, inverse=True)
        before = list(chain.pieces[:i])
        after = list(chain.pieces[i:])
        if before and _fusable(before[-1]):
            last = before.pop()
            fused = fuse(CobordismChain((Piece(last.expr),) + psi.pieces))
            before.append(Piece(fused.pieces[0].expr, last.cls))
        else:
            before.extend(fuse(psi).pieces)
        if after and _fusable(after[0]) and not after[0].has_class:
            first = after.pop(0)
            after.insert(0, fuse(CobordismChain(psi_inv.pieces + (first,))).pieces[0])
        else:
            after = list(fuse(psi_inv).pieces) + after
        return CobordismChain(tuple(before + after))
    raise MoveNotApplicable(f"unknown move {move!r}")


# -- standard chains --------------------------------------------------------

def lens_gluing(p: int, q: int) -> WordSubstitution:
    """Genus-1 gluing map sending B to A^p B^-q and A to A^a B^b (determinant one)."""
    g, x, y = extended_gcd(q, p)
    if g != 1:
        raise InvalidParams(f"gcd({p}, {q}) must be 1")
    a, b = -x, -y  # then -a q - b p = 1
    Aw, Bw = Word.gen(0), Word.gen(1)
    return WordSubstitution(1, ((1, Aw ** a * Bw ** b), (1, Aw ** p * Bw ** (-q))))


def lens_chain(p: int, q: int, c=(0, 0)) -> CobordismChain:
    """Heegaard chain of L(p, q): 1-handle with B = (-1)^c0, gluing, beta 2-handle
    carrying the class dual to alpha when c1 = 1."""
    e0 = (-1) ** c[0]
    flip = SignFlip.from_curves(1, alpha=(0,) if c[1] else ()).bits
    return CobordismChain((
        Piece(OneHandle(0, e0, 0)),
        Piece(lens_gluing(p, q)),
        Piece(TwoHandle(1, ("b", 0), 1), flip),
    ))


def s2xs1_chain(c: int = 0) -> CobordismChain:
    return CobordismChain((
        Piece(OneHandle(0, 1, 0)),
        Piece(TwoHandle(1, ("b", 0), 1), SignFlip.from_curves(1, alpha=(0,) if c else ()).bits),
    ))


def stabilized_lens_chain(p: int, q: int, c=(0, 0)) -> CobordismChain:
    """Lens chain with an extra cancelling pair so every Cerf move has a site."""
    e0 = (-1) ** c[0]
    phi = lens_gluing(p, q)
    imgs = tuple((s, w) for s, w in phi.images) + ((1, Word.gen(2)), (1, Word.gen(3)))
    flip = list(SignFlip.from_curves(2, alpha=(0,) if c[1] else ()).bits)
    return CobordismChain((
        Piece(OneHandle(0, e0, 0)),
        Piece(OneHandle(1, 1, 1)),
        Piece(WordSubstitution(2, imgs)),
        Piece(TwoHandle(2, ("b", 0), 1), tuple(flip)),
        Piece(TwoHandle(1, ("a", 0), 1)),
    ))


def orbit_summary(chain: CobordismChain, restarts: int = 500, tol: float = 1e-10,
                  seed: int = 17) -> dict:
    orbits = solve_numeric(generalized_intersections(chain), restarts, tol, seed)
    return {"orbits": len(orbits), "kinds": kind_histogram(orbits)}


def dumps(chain: CobordismChain) -> str:
    return json.dumps(chain.to_json(), sort_keys=True)
