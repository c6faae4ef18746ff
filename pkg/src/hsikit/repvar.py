"""SU(2) representation varieties of finitely presented groups.

Exact enumerators cover lens spaces and Brieskorn spheres; ``solve_numeric``
handles arbitrary presentations by Riemannian descent on a product of unit
quaternion spheres followed by Levenberg-Marquardt polishing, then groups
the converged points into conjugation orbits.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InternalError, InvalidParams, NoConvergence
from .grpres import Presentation, Word, pairwise_coprime
from .manifolds import seifert_invariants
from .su2 import SU2Element, haar, qconj, qexp, qleft, qmul, qright

log = logging.getLogger(__name__)

CENTRAL_TOL = 1e-7
CLUSTER_RADIUS = 1e-6
MAX_TRIPLES_GENERATORS = 6


@dataclass(frozen=True)
class TwistedRepProblem:
    """Find rho with rho(w) = sign * I for every (w, sign) in ``twisted_relators``.

    ``constants`` pins some generators to fixed (possibly non-central)
    values; those generators are not unknowns.  The public invariant that
    targets are central is kept: a non-central equation is expressed through
    a constant generator.
    """

    presentation: Presentation
    twisted_relators: tuple
    constants: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        rels = tuple((w, int(s)) for w, s in self.twisted_relators)
        for w, s in rels:
            if s not in (1, -1):
                raise InvalidParams("relator targets must be +I or -I")
            if w.max_generator() >= self.presentation.n_generators:
                raise InvalidParams("relator uses a missing generator")
        object.__setattr__(self, "twisted_relators", rels)

    @classmethod
    def untwisted(cls, P: Presentation) -> TwistedRepProblem:
        return cls(P, tuple((r, 1) for r in P.relators))

    @classmethod
    def twisted(cls, P: Presentation, mu) -> TwistedRepProblem:
        """Relators of P equal I and the marked word ``mu`` goes to -I."""
        w = P.marked_word(mu) if isinstance(mu, str) else mu
        return cls(P, tuple((r, 1) for r in P.relators) + ((w, -1),))

    @property
    def n(self) -> int:
        return self.presentation.n_generators


@dataclass(frozen=True)
class RepOrbit:
    representative: tuple
    kind: str  # "central" | "abelian" | "irreducible"
    orbit_type: str  # "point" | "S2" | "SO3"
    residual: float
    signature: tuple

    def to_json(self) -> dict:
        return {"kind": self.kind, "orbit_type": self.orbit_type,
                "residual": self.residual,
                "signature": [round(s, 9) for s in self.signature]}


ORBIT_TYPE = {"central": "point", "abelian": "S2", "irreducible": "SO3"}


# -- exact evaluation -------------------------------------------------------

def evaluate_word(w: Word, images) -> SU2Element:
    out = SU2Element.identity()
    for g, e in w:
        out = out * (images[g] if e == 1 else images[g].inverse())
    return out


def residual(prob: TwistedRepProblem, images) -> float:
    """Max distance of rho(w) from its target, recomputed from scratch."""
    worst = 0.0
    for w, s in prob.twisted_relators:
        worst = max(worst, evaluate_word(w, images).distance(SU2Element.central(s)))
    for g, val in prob.constants.items():
        worst = max(worst, images[g].distance(val))
    return worst


def classify(images, tol: float = CENTRAL_TOL) -> str:
    if all(g.is_central(tol) for g in images):
        return "central"
    one = SU2Element.identity()
    for a, b in itertools.combinations(images, 2):
        if (a * b * a.inverse() * b.inverse()).distance(one) > tol:
            return "irreducible"
    return "abelian"


def signature_words(n: int) -> list[Word]:
    words = [Word.gen(i) for i in range(n)]
    words += [Word.gen(i) * Word.gen(j) for i, j in itertools.combinations(range(n), 2)]
    if n <= MAX_TRIPLES_GENERATORS:
        words += [Word.gen(i) * Word.gen(j) * Word.gen(k)
                  for i, j, k in itertools.combinations(range(n), 3)]
    return words


def signature(images) -> tuple:
    """Traces over generators and their ordered products of length 2 and 3."""
    return tuple(evaluate_word(w, images).trace() for w in signature_words(len(images)))


# -- reduction: pin single letters, eliminate once-occurring generators ------

@dataclass
class _Reduced:
    relators: list  # (Word, sign) over the original generator indices
    pinned: dict  # generator -> +1/-1
    eliminated: list  # (generator, sign, Word) in elimination order
    empty: bool = False


def _substitute(w: Word, s: int, g: int, sign: int, image: Word) -> tuple[Word, int]:
    out = []
    for h, e in w:
        if h == g:
            if sign < 0:
                s = -s
            out.extend(image.letters if e == 1 else image.inverse().letters)
        else:
            out.append((h, e))
    return Word(out), s


def _reduce(prob: TwistedRepProblem, eliminate: bool) -> _Reduced:
    rels = list(prob.twisted_relators)
    consts = set(prob.constants)
    pinned: dict[int, int] = {}
    eliminated = []
    while True:
        kept = []
        for w, s in rels:
            if len(w) == 0:
                if s == -1:
                    return _Reduced([], pinned, eliminated, empty=True)
                continue
            kept.append((w, s))
        rels = kept
        pin = next(((w, s) for w, s in rels
                    if len(w) == 1 and w.letters[0][0] not in consts), None)
        if pin is not None:
            g = pin[0].letters[0][0]
            pinned[g] = pin[1]
            rels = [_substitute(w, s, g, pin[1], Word()) for w, s in rels]
            continue
        if not eliminate:
            break
        target = None
        for idx, (w, s) in enumerate(rels):
            counts: dict[int, int] = {}
            for h, _ in w:
                counts[h] = counts.get(h, 0) + 1
            once = [h for h, k in counts.items() if k == 1 and h not in consts]
            if once:
                target = (idx, once[0])
                break
        if target is None:
            break
        idx, g = target
        w, s = rels.pop(idx)
        k = next(i for i, (h, _) in enumerate(w.letters) if h == g)
        e = w.letters[k][1]
        P, S = Word(w.letters[:k]), Word(w.letters[k + 1:])
        # P g^e S = s  =>  g^e = s P^-1 S^-1
        image = P.inverse() * S.inverse()
        if e == -1:
            image = image.inverse()
        eliminated.append((g, s, image))
        rels = [_substitute(r, t, g, s, image) for r, t in rels]
    return _Reduced(rels, pinned, eliminated)


# -- batched numerics -------------------------------------------------------

class _Tape:
    """Relators compiled for batched evaluation over the free generators."""

    def __init__(self, rels, free, constants):
        self.free = list(free)
        col = {g: i for i, g in enumerate(self.free)}
        self.const = {g: np.asarray(v.as_array()) for g, v in constants.items()}
        self.rels = []
        for w, s in rels:
            letters = [(col.get(g, -1), g, e) for g, e in w]
            target = np.array([float(s), 0.0, 0.0, 0.0])
            self.rels.append((letters, target))

    def _letter(self, X, slot, g, e):
        q = X[:, slot] if slot >= 0 else np.broadcast_to(self.const[g], (X.shape[0], 4))
        return q if e == 1 else qconj(q)

    def residuals(self, X, jac: bool = False):
        B, n = X.shape[0], len(self.free)
        res = np.zeros((B, len(self.rels), 4))
        J = np.zeros((B, len(self.rels), 4, n, 3)) if jac else None
        one = np.zeros((B, 4))
        one[:, 0] = 1.0
        for r, (letters, target) in enumerate(self.rels):
            qs = [self._letter(X, slot, g, e) for slot, g, e in letters]
            pre = [one]
            for q in qs:
                pre.append(qmul(pre[-1], q))
            res[:, r] = pre[-1] - target
            if not jac:
                continue
            suf = [one]
            for q in reversed(qs):
                suf.append(qmul(q, suf[-1]))
            suf.reverse()  # suf[k] = product of letters k..end
            for k, (slot, g, e) in enumerate(letters):
                if slot < 0:
                    continue
                if e == 1:
                    L, R, sgn = pre[k + 1], suf[k + 1], 1.0
                else:
                    L, R, sgn = pre[k], suf[k], -1.0
                # d/dxi of L xi R for pure xi: columns 1..3 of left(L) @ right(R)
                J[:, r, :, slot, :] += sgn * (qleft(L) @ qright(R)[..., 1:])
        if jac:
            return res.reshape(B, -1), J.reshape(B, len(self.rels) * 4, n * 3)
        return res.reshape(B, -1)

    def max_dist(self, X):
        res = self.residuals(X).reshape(X.shape[0], len(self.rels), 4)
        return np.linalg.norm(res, axis=-1).max(axis=-1) if self.rels else np.zeros(X.shape[0])


def _retract(X, step):
    B, n = X.shape[0], X.shape[1]
    E = qexp(step.reshape(B, n, 3))
    Y = qmul(X, E)
    return Y / np.linalg.norm(Y, axis=-1, keepdims=True)


def _descend(tape: _Tape, X, gd_iters: int, lm_iters: int, tol: float):
    """Armijo gradient descent, then Levenberg-Marquardt."""
    B = X.shape[0]
    step = np.full(B, 0.5)
    for _ in range(gd_iters):
        r, J = tape.residuals(X, jac=True)
        f = 0.5 * np.sum(r * r, axis=1)
        g = np.einsum("bij,bi->bj", J, r)
        gg = np.sum(g * g, axis=1)
        t = step.copy()
        active = gg > 1e-30
        Y = X.copy()
        for _ls in range(20):
            trial = _retract(X, -t[:, None] * g)
            rt = tape.residuals(trial)
            ft = 0.5 * np.sum(rt * rt, axis=1)
            ok = ft <= f - 1e-4 * t * gg
            take = active & ok
            Y[take] = trial[take]
            active &= ~ok
            if not active.any():
                break
            t = np.where(active, t * 0.5, t)
        X = Y
        step = np.minimum(t * 2.0, 2.0)
    lam = np.full(B, 1e-3)
    eye = np.eye(X.shape[1] * 3)
    for _ in range(lm_iters):
        act = np.flatnonzero((tape.max_dist(X) >= tol * 1e-2) & (lam < 1e8))
        if act.size == 0:
            break
        Xa, la = X[act], lam[act]
        r, J = tape.residuals(Xa, jac=True)
        f = 0.5 * np.sum(r * r, axis=1)
        JtJ = np.einsum("bij,bik->bjk", J, J)
        g = np.einsum("bij,bi->bj", J, r)
        A = JtJ + la[:, None, None] * (np.einsum("bii->bi", JtJ)[:, :, None] * eye + eye)
        delta = -np.linalg.solve(A, g[:, :, None])[:, :, 0]
        trial = _retract(Xa, delta)
        rt = tape.residuals(trial)
        ok = 0.5 * np.sum(rt * rt, axis=1) < f
        X[act] = np.where(ok[:, None, None], trial, Xa)
        lam[act] = np.where(ok, np.maximum(la / 3.0, 1e-12), la * 4.0)
    return X


def _reconstruct(prob, red: _Reduced, free, Xrow) -> list[SU2Element]:
    images: dict[int, SU2Element] = {}
    for i, g in enumerate(free):
        images[g] = SU2Element.from_array(Xrow[i])
    images.update(prob.constants)
    for g, s in red.pinned.items():
        images[g] = SU2Element.central(s)
    for g, s, image in reversed(red.eliminated):
        images[g] = evaluate_word(image, images) * SU2Element.central(s)
    for g in range(prob.n):
        images.setdefault(g, SU2Element.identity())
    return [images[g] for g in range(prob.n)]


def solve_numeric(prob: TwistedRepProblem, restarts: int = 500, tol: float = 1e-10,
                  seed: int = 17, eliminate: bool = True,
                  gd_iters: int = 20, lm_iters: int = 100) -> list[RepOrbit]:
    """Numerically find the conjugation orbits of solutions.

    Returns ``[]`` only when the equations are contradictory after exact
    pinning of single-letter relators; raises NoConvergence when every
    restart stays above ``tol``.
    """
    if restarts < 1 or tol <= 0:
        raise InvalidParams("need restarts >= 1 and tol > 0")
    red = _reduce(prob, eliminate)
    if red.empty:
        return []
    bound = set(red.pinned) | set(prob.constants) | {g for g, _, _ in red.eliminated}
    free = [g for g in range(prob.n) if g not in bound]
    rng = np.random.default_rng(seed)
    tape = _Tape(red.relators, free, prob.constants)
    if free:
        X = haar(rng, (restarts, len(free)))
        X = _descend(tape, X, gd_iters, lm_iters, tol)
    else:
        X = np.zeros((1, 0, 4))
    orbits: list[RepOrbit] = []
    for row in X:
        images = _reconstruct(prob, red, free, row)
        res = residual(prob, images)
        if res >= tol:
            continue
        sig = signature(images)
        if any(max(abs(a - b) for a, b in zip(sig, o.signature)) < CLUSTER_RADIUS
               for o in orbits):
            continue
        kind = classify(images)
        orbits.append(RepOrbit(tuple(images), kind, ORBIT_TYPE[kind], res, sig))
    if not orbits:
        if free and not tape.rels:
            raise InternalError("unconstrained generators failed to converge")
        raise NoConvergence(f"no restart reached residual < {tol}")
    log.debug("solve_numeric: %d orbits from %d restarts", len(orbits), restarts)
    orbits.sort(key=lambda o: (o.kind, o.signature))
    return orbits


def kind_histogram(orbits) -> dict[str, int]:
    out = {"central": 0, "abelian": 0, "irreducible": 0}
    for o in orbits:
        out[o.kind] += 1
    return out


# -- lens spaces ------------------------------------------------------------

@dataclass(frozen=True)
class LensComponent:
    angle: Fraction  # rotation angle of A as a multiple of pi
    orbit_type: str  # "point" or "S2"

    @property
    def trace(self) -> float:
        return 2.0 * math.cos(math.pi * float(self.angle))

    @property
    def kind(self) -> str:
        return "central" if self.orbit_type == "point" else "abelian"


def lens_problem(p: int, q: int, c=(0, 0)) -> TwistedRepProblem:
    """{B = e0 I, A^p B^-q = e1 I} on generators (A, B), e_i = (-1)^{c_i}."""
    e0, e1 = (-1) ** c[0], (-1) ** c[1]
    A, B = Word.gen(0), Word.gen(1)
    P = Presentation(2, (), {}, ("A", "B"))
    return TwistedRepProblem(P, ((B, e0), (A ** p * B ** (-q), e1)))


def enumerate_lens(p: int, q: int, c=(0, 0)) -> list[LensComponent]:
    """Exact components of {B = e0 I, A^p B^-q = e1 I} up to conjugation."""
    if p < 1 or math.gcd(p, q) != 1:
        raise InvalidParams(f"need p >= 1 and gcd(p, q) = 1, got ({p}, {q})")
    e0, e1 = (-1) ** c[0], (-1) ** c[1]
    target = e1 * e0 ** (q % 2)
    want = 0 if target == 1 else 1  # A = exp(i pi m / p) with m = want (mod 2)
    out = []
    for m in range(0, p + 1):
        if m % 2 != want:
            continue
        angle = Fraction(m, p)
        if angle == 0 or angle == 1:
            out.append(LensComponent(angle, "point"))
        else:
            out.append(LensComponent(angle, "S2"))
    return out


def perturbed_count(components) -> int:
    """Points count once, each 2-sphere twice."""
    return sum(1 if c.orbit_type == "point" else 2 for c in components)


# -- Brieskorn spheres ------------------------------------------------------

@dataclass(frozen=True)
class BrieskornOrbit:
    rotation: tuple  # (l1, l2, l3): x_i has angle pi * l_i / a_i
    fiber_sign: int  # rho(h) = fiber_sign * I

    def traces(self, a) -> tuple:
        return tuple(2.0 * math.cos(math.pi * l / ai) for l, ai in zip(self.rotation, a))


def _strict_triangle(t1: Fraction, t2: Fraction, t3: Fraction) -> bool:
    """Angles in units of pi; strict spherical triangle inequalities."""
    return abs(t1 - t2) < t3 < min(t1 + t2, 2 - t1 - t2)


def enumerate_brieskorn(a) -> list[BrieskornOrbit]:
    """Irreducible orbits of the Seifert presentation, one per feasible triple."""
    a = tuple(int(x) for x in a)
    if len(a) != 3 or min(a) < 2 or not pairwise_coprime(a):
        raise InvalidParams(f"Brieskorn exponents {a} must be >= 2 and pairwise coprime")
    b0, bs = seifert_invariants(a)
    out = []
    for eps in (1, -1):
        allowed = [[l for l in range(1, ai) if (-1) ** l == eps ** bi]
                   for ai, bi in zip(a, bs)]
        delta = eps ** b0
        for l1, l2, l3 in itertools.product(*allowed):
            t1, t2, t3 = Fraction(l1, a[0]), Fraction(l2, a[1]), Fraction(l3, a[2])
            # x1 x2 = delta * x3^-1, whose angle is t3 or 1 - t3
            eff = t3 if delta == 1 else 1 - t3
            if _strict_triangle(t1, t2, eff):
                out.append(BrieskornOrbit((l1, l2, l3), eps))
    return out


def casson_brieskorn(a) -> int:
    """Half the number of irreducible orbits (normalized so Sigma(2,3,5) gives 1)."""
    n = len(enumerate_brieskorn(a))
    if n % 2:
        raise InternalError(f"odd irreducible count {n} for {tuple(a)}")
    return n // 2


def brieskorn_problem(a) -> TwistedRepProblem:
    from .manifolds import Brieskorn, pi1
    return TwistedRepProblem.untwisted(pi1(Brieskorn(tuple(a))))


def sample_points(prob: TwistedRepProblem, n: int, seed: int = 17, tol: float = 1e-10,
                  eliminate: bool = True) -> list[list[SU2Element]]:
    """Up to ``n`` converged solutions, not grouped into orbits."""
    red = _reduce(prob, eliminate)
    if red.empty:
        return []
    bound = set(red.pinned) | set(prob.constants) | {g for g, _, _ in red.eliminated}
    free = [g for g in range(prob.n) if g not in bound]
    rng = np.random.default_rng(seed)
    if free:
        X = _descend(_Tape(red.relators, free, prob.constants),
                     haar(rng, (n, len(free))), 20, 100, tol)
    else:
        X = np.zeros((1, 0, 4))
    out = []
    for row in X:
        images = _reconstruct(prob, red, free, row)
        if residual(prob, images) < tol:
            out.append(images)
    return out
