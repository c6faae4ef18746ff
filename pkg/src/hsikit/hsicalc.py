"""HSI groups for the resolved families, Euler checks, triad rank arithmetic,
minimality certificates and Brieskorn rank bounds.

Rule names recorded in provenance fields:

* ``genus-one splitting``: lens spaces have free HSI of rank p in even
  degrees, and S^2 x S^1 has Z[0] + Z[3] for c = 0 and 0 otherwise.
* ``kunneth``: connected sums.
* ``euler law``: |chi| = |H_1| (0 when b_1 > 0).
* ``surgery triad``: a triad with |H_1| additive whose two smaller members
  are minimal has a minimal third member.
* ``blow-down``: removing a weight-1 leaf of a plumbing keeps the manifold.
* ``quasi-alternating``: double covers of QA links, via resolution triads.
* ``torus-knot lens surgery``: rs - 1 surgery on T(r, s) is a lens space.
* ``spectral sequence bound``: the conditional Brieskorn rank bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InconsistentInputs, InvalidParams
from .gradedab import GradedAbelianGroup
from .linkdiag import Unknown, certify_quasi_alternating
from .manifolds import (
    Brieskorn,
    ConnectedSum,
    DoubleBranchedCover,
    Lens,
    ManifoldDesc,
    PlumbingTree,
    S2xS1,
    SurgeryOnTorusKnot,
    h1_order,
    plumbing_det,
    z2_rank,
)

GENUS_ONE = "genus-one splitting"
KUNNETH = "kunneth"
EULER_LAW = "euler law"
TRIAD = "surgery triad"
BLOW_DOWN = "blow-down"
QA = "quasi-alternating"
TORUS_LENS = "torus-knot lens surgery"
SPECTRAL = "spectral sequence bound"


@dataclass
class HSIResult:
    """HSI of (Y, c).

    ``group`` is None when only bounds are known.  ``parity`` is "even" when
    the group is known to sit in even degrees, "uniform" when it is free of
    rank |chi| (so in a single parity that is not anchored), else None.
    """

    manifold: str
    group: GradedAbelianGroup | None
    rank: int | None
    minimal: bool
    provenance: list = field(default_factory=list)
    chi_abs: int | None = None
    h1_order: int | None = None
    bounds: tuple | None = None
    parity: str | None = None
    conditional: bool = False

    def to_json(self) -> dict:
        out = {"manifold": self.manifold, "rank": self.rank, "minimal": self.minimal,
               "parity": self.parity, "chi_abs": self.chi_abs, "h1_order": self.h1_order,
               "provenance": list(self.provenance)}
        if self.group is not None:
            out["group"] = self.group.to_json()
        if self.bounds is not None:
            out["rank_bounds"] = list(self.bounds)
        if self.conditional:
            out["conditional"] = True
        return out


def _class_bits(desc: ManifoldDesc, c) -> tuple:
    n = z2_rank(desc)
    if c is None:
        return (0,) * n
    c = tuple(int(b) % 2 for b in c)
    if len(c) != n:
        raise InvalidParams(f"class c needs {n} bits for {desc.label()}, got {len(c)}")
    return c


def _s2xs1_group(c_nonzero: bool) -> GradedAbelianGroup:
    if c_nonzero:
        return GradedAbelianGroup.zero()
    return GradedAbelianGroup({0: [0], 3: [0]})


def _minimal_result(desc, rank, provenance, parity="uniform") -> HSIResult:
    return HSIResult(desc.label(), GradedAbelianGroup.free(rank, 0, coarse=True), rank, True,
                     provenance, rank, rank, (rank, rank), parity)


def hsi(desc: ManifoldDesc, c=None) -> HSIResult:
    """Exact HSI where resolved, otherwise chi and rank bounds."""
    bits = _class_bits(desc, c)
    if isinstance(desc, Lens):
        return _minimal_result(desc, desc.p, [GENUS_ONE], parity="even")
    if isinstance(desc, S2xS1) or (isinstance(desc, SurgeryOnTorusKnot)
                                   and desc.is_unknot() and desc.n == 0):
        G = _s2xs1_group(any(bits))
        return HSIResult(desc.label(), G, G.rank(), False, [GENUS_ONE], G.euler_abs(), 0,
                         (G.rank(), G.rank()), None)
    if isinstance(desc, ConnectedSum):
        return _connected_sum(desc, bits)
    cert = certify_minimal(desc)
    if not isinstance(cert, Unknown):
        rank = h1_order(desc)
        return _minimal_result(desc, rank, sorted(cert.rules()))
    order = h1_order(desc)
    res = HSIResult(desc.label(), None, None, False, [EULER_LAW], order, order,
                    (order, None), None)
    if isinstance(desc, Brieskorn) and not any(bits):
        b = brieskorn_bounds(desc.a)
        res.bounds = (order, b.rational)
        res.provenance.append(SPECTRAL)
        res.conditional = True
    return res


def _connected_sum(desc: ConnectedSum, bits) -> HSIResult:
    parts = []
    k = 0
    for part in desc.parts:
        n = z2_rank(part)
        parts.append(hsi(part, bits[k:k + n]))
        k += n
    prov = sorted({p for r in parts for p in r.provenance} | {KUNNETH})
    order = h1_order(desc)
    if any(r.group is None for r in parts):
        return HSIResult(desc.label(), None, None, False, prov, order, order, (order, None))
    G = parts[0].group
    for r in parts[1:]:
        G = G.kunneth(r.group)
    minimal = all(r.minimal for r in parts)
    if all(r.parity == "even" for r in parts):
        parity = "even"
    else:
        parity = "uniform" if minimal else None
    return HSIResult(desc.label(), G, G.rank(), minimal, prov, G.euler_abs(), order,
                     (G.rank(), G.rank()), parity)


# -- Euler characteristic ---------------------------------------------------

@dataclass(frozen=True)
class EulerCheck:
    chi_abs: int
    h1_order: int
    source: str

    @property
    def agrees(self) -> bool:
        return self.chi_abs == self.h1_order


ORBIT_EULER = {"point": 1, "S2": 2, "SO3": 0}


def euler_check(desc: ManifoldDesc, c=None) -> EulerCheck:
    """(|chi| predicted, |H_1| with 0 for infinite) and where chi came from."""
    order = h1_order(desc)
    if isinstance(desc, Brieskorn) and not any(_class_bits(desc, c)):
        from .repvar import enumerate_brieskorn
        # the only reducible is the trivial point; each irreducible is an SO(3)
        chi = ORBIT_EULER["point"] + ORBIT_EULER["SO3"] * len(enumerate_brieskorn(desc.a))
        return EulerCheck(chi, order, "representation variety")
    res = hsi(desc, c)
    if res.group is not None:
        return EulerCheck(res.group.euler_abs(), order, "hsi group")
    return EulerCheck(order, order, EULER_LAW)


# -- triads -----------------------------------------------------------------

def triad_rank_bounds(rank_beta: int, rank_gamma: int, chi_alpha: int) -> tuple[int, int]:
    """Interval for rank_alpha allowed by an exact triangle and |chi_alpha|."""
    if min(rank_beta, rank_gamma, chi_alpha) < 0:
        raise InvalidParams("ranks and chi must be nonnegative")
    hi = rank_beta + rank_gamma
    if chi_alpha > hi:
        raise InconsistentInputs(f"chi {chi_alpha} exceeds rank_beta + rank_gamma = {hi}")
    lo = max(chi_alpha, abs(rank_beta - rank_gamma))
    parity = chi_alpha % 2
    if lo % 2 != parity:
        lo += 1
    if hi % 2 != parity:
        hi -= 1
    if lo > hi:
        raise InconsistentInputs("no rank compatible with exactness and parity")
    return lo, hi


def is_admissible_triad(alpha: ManifoldDesc, beta: ManifoldDesc, gamma: ManifoldDesc) -> bool:
    a, b, g = h1_order(alpha), h1_order(beta), h1_order(gamma)
    return a == b + g


# -- minimality certificates ------------------------------------------------

@dataclass
class MinimalCertificate:
    manifold: str
    rule: str
    h1_order: int
    children: list = field(default_factory=list)
    check: str = ""

    def nodes(self):
        yield self
        for ch in self.children:
            yield from ch.nodes()

    def rules(self) -> set:
        return {n.rule for n in self.nodes()}

    def verify(self) -> bool:
        """Every triad node has |H_1| additive; every other node keeps |H_1|."""
        for n in self.nodes():
            kids = [ch.h1_order for ch in n.children]
            if n.rule in (TRIAD, QA) and n.children:
                if n.h1_order != sum(kids) or len(kids) != 2:
                    return False
            elif n.rule == KUNNETH:
                prod = 1
                for k in kids:
                    prod *= k
                if n.h1_order != prod:
                    return False
            elif n.rule == BLOW_DOWN and kids != [n.h1_order]:
                return False
        return True

    def to_json(self) -> dict:
        out = {"manifold": self.manifold, "rule": self.rule, "h1_order": self.h1_order}
        if self.check:
            out["check"] = self.check
        if self.children:
            out["children"] = [ch.to_json() for ch in self.children]
        return out


def _lens_leaf(p: int, q: int = 1, rule: str = GENUS_ONE) -> MinimalCertificate:
    return MinimalCertificate(Lens(p, q).label(), rule, p)


def _triad(label, order, beta, gamma) -> MinimalCertificate:
    check = f"{order} = {beta.h1_order} + {gamma.h1_order}"
    return MinimalCertificate(label, TRIAD, order, [beta, gamma], check)


def plumbing_qualifies(T: PlumbingTree) -> bool:
    """m(v) >= d(v) everywhere, strict somewhere in every tree component."""
    if not T.weights:
        return False
    for comp in T.components():
        slack = [m - comp.degree(v) for v, m in enumerate(comp.weights)]
        if min(slack) < 0 or max(slack) == 0:
            return False
    return True


@lru_cache(maxsize=4096)
def _certify_tree(weights: tuple, edges: tuple) -> MinimalCertificate | None:
    T = PlumbingTree(weights, edges)
    label = T.label()
    order = plumbing_det(T)
    n = len(weights)
    if n == 1:
        m = weights[0]
        return _lens_leaf(m) if m >= 1 else None
    leaves = [v for v in range(n) if T.degree(v) == 1]
    for v in leaves:
        if weights[v] == 1:
            sub = _blow_down(T, v)
            child = _certify_tree(sub.weights, sub.edges)
            if child is None:
                return None
            return MinimalCertificate(label, BLOW_DOWN, order, [child],
                                      f"{order} = {child.h1_order}")
    slack = [weights[v] - T.degree(v) for v in range(n)]
    for v in leaves:
        if weights[v] < 2:
            continue
        lowered = list(weights)
        lowered[v] -= 1
        new_slack = list(slack)
        new_slack[v] -= 1
        if max(new_slack) <= 0:
            continue
        beta = _certify_tree(tuple(lowered), edges)
        sub = _remove_vertex(T, v)
        gamma = _certify_tree(sub.weights, sub.edges)
        if beta is None or gamma is None or order != beta.h1_order + gamma.h1_order:
            continue
        return _triad(label, order, beta, gamma)
    return None


def _remove_vertex(T: PlumbingTree, v: int) -> PlumbingTree:
    keep = [u for u in range(len(T.weights)) if u != v]
    idx = {u: i for i, u in enumerate(keep)}
    return PlumbingTree(tuple(T.weights[u] for u in keep),
                        tuple((idx[a], idx[b]) for a, b in T.edges if v not in (a, b)))


def _blow_down(T: PlumbingTree, v: int) -> PlumbingTree:
    (u,) = T.neighbors(v)
    w = list(T.weights)
    w[u] -= 1
    return _remove_vertex(PlumbingTree(tuple(w), T.edges), v)


def blow_up(T: PlumbingTree, w: int) -> PlumbingTree:
    """Attach a weight-1 leaf to vertex w and raise m(w) by one."""
    weights = list(T.weights)
    weights[w] += 1
    weights.append(1)
    return PlumbingTree(tuple(weights), T.edges + ((w, len(T.weights)),))


def _certify_plumbing(T: PlumbingTree):
    if not plumbing_qualifies(T):
        return Unknown("plumbing weights do not satisfy m(v) >= d(v) with a strict vertex")
    certs = []
    for comp in T.components():
        cert = _certify_tree(comp.weights, comp.edges)
        if cert is None:
            return Unknown("plumbing induction failed")
        certs.append(cert)
    if len(certs) == 1:
        return certs[0]
    return MinimalCertificate(T.label(), KUNNETH, plumbing_det(T), certs)


def _certify_torus_surgery(S: SurgeryOnTorusKnot):
    r, s, n = S.r, S.s, S.n
    if S.is_unknot():
        if n == 0:
            return Unknown("0-surgery on the unknot is S2xS1")
        return _lens_leaf(abs(n))
    n0 = r * s - 1
    if n < n0:
        return Unknown(f"no certified surgery below n0 = {n0}")
    cert = MinimalCertificate(SurgeryOnTorusKnot(r, s, n0).label(), TORUS_LENS, n0,
                              [_lens_leaf(n0, (s * s) % n0 or 1)])
    sphere = _lens_leaf(1, 0)
    for k in range(n0 + 1, n + 1):
        cert = _triad(SurgeryOnTorusKnot(r, s, k).label(), k, cert, sphere)
    return cert


def _qa_to_minimal(node) -> MinimalCertificate:
    label = f"Sigma2({node.diagram.to_json()})"
    if node.is_leaf:
        return MinimalCertificate(label, GENUS_ONE, 1, [], "double cover of the unknot is S3")
    kids = [_qa_to_minimal(ch) for ch in node.children]
    return MinimalCertificate(label, QA, node.det, kids,
                              f"{node.det} = {node.det0} + {node.det1}")


def certify_minimal(desc: ManifoldDesc):
    """Build a minimality certificate tree, or return Unknown."""
    if isinstance(desc, Lens):
        return _lens_leaf(desc.p, desc.q)
    if isinstance(desc, PlumbingTree):
        return _certify_plumbing(desc)
    if isinstance(desc, SurgeryOnTorusKnot):
        return _certify_torus_surgery(desc)
    if isinstance(desc, DoubleBranchedCover):
        qa = certify_quasi_alternating(desc.diagram)
        if isinstance(qa, Unknown):
            return Unknown(f"quasi-alternating search: {qa.reason}")
        return _qa_to_minimal(qa)
    if isinstance(desc, ConnectedSum):
        certs = [certify_minimal(p) for p in desc.parts]
        if any(isinstance(cc, Unknown) for cc in certs):
            return Unknown("a summand is not certified")
        return MinimalCertificate(desc.label(), KUNNETH, h1_order(desc), certs)
    return Unknown(f"no certification rule for {desc.kind}")


# -- Brieskorn bounds -------------------------------------------------------

@dataclass(frozen=True)
class BrieskornBounds:
    rational: int
    integral: int
    mod2: int
    casson: int
    conditional: bool = True
    note: str = "conditional on the spectral sequence from the representation variety"

    def as_tuple(self) -> tuple:
        return (self.rational, self.integral, self.mod2)

    def to_json(self) -> dict:
        return {"bound_Q": self.rational, "bound_Z": self.integral, "bound_Z2": self.mod2,
                "lambda": self.casson, "conditional": self.conditional, "note": self.note,
                "provenance": [SPECTRAL]}


def brieskorn_bounds(a) -> BrieskornBounds:
    from .repvar import casson_brieskorn
    lam = casson_brieskorn(a)
    return BrieskornBounds(4 * lam + 1, 4 * lam + 1, 8 * lam + 1, lam)
