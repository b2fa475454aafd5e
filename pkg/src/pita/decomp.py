"""Incidence comultiplication of surjections and the factorisation fibres.

On the surjection instance the comultiplication of an order-preserving
map f sums, over all two-step factorisations of f whose second leg is
order-preserving, the op part of the first leg tensored with the second
leg, both recorded up to isomorphism as weakly decreasing fibre-size
labels. With unit weights this reproduces the exponential coefficient
table (k! times the partial Bell numbers on connected classes); the
classical composition coefficients drop the k! and the two tables
already disagree in degree 2, which keeps the routes distinguishable.

The decomposition-space part compares two fibres of the composition
face. Over a locally order-preserving 2-chain (f, then bottom) the fibre
C_1 consists of all factorisations (h, e) of f with compose(e, bottom)
order-preserving, with a morphism x -> y for every middle
quasibijection sigma satisfying both factorisation triangles whose
square over (e_x, e_y) is fibrewise order-preserving. The fibre C_2 over
the reflected 1-chain consists of factorisations of the op part of f
with order-preserving second leg, and is discrete. The comparison
functors land exactly:

    F(h, e) = (eta_rel(h, e), eta(e))        G(h, e) = (compose(pi(f), h), e)

with F after G the identity and the unit at (h, e) the quasibijection
pi(e). verify_decomposition_fibres checks all of this by enumeration,
plus the analogue one level up where the 2-chain grows to a 3-chain and
eta_rel replaces eta throughout.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from math import factorial

from . import finskel
from .errors import ShapeError, UnsupportedInstanceError
from .factorisation import eta_rel, pita_general
from .finskel import FinMap, compose, identity, inverse, ordinal_sum
from .opcat import (
    OperadicInstance,
    Report,
    is_fop_square,
    is_op_morphism,
    quasibijections,
)

IsoClassLabel = tuple[int, ...]


def label(f: FinMap) -> IsoClassLabel:
    """Fibre sizes of f, weakly decreasing. Classifies f up to iso."""
    return tuple(sorted(Counter(f.values).values(), reverse=True))


def connected_label(n: int) -> IsoClassLabel:
    if n < 1:
        raise ShapeError(f"connected classes start at cardinality 1, got {n}")
    return (n,)


def _require_surjection_instance(inst: OperadicInstance):
    if getattr(inst, "name", None) != "fin-surj":
        raise UnsupportedInstanceError(
            "the comultiplication lives on the surjection instance, got "
            f"{getattr(inst, 'name', inst)!r}"
        )


@dataclass
class CoalgebraElement:
    """Integer combination of label (x) label tensors."""

    terms: dict[tuple[IsoClassLabel, IsoClassLabel], int] = field(
        default_factory=dict
    )

    def add(self, left: IsoClassLabel, right: IsoClassLabel, coeff: int = 1):
        key = (tuple(left), tuple(right))
        new = self.terms.get(key, 0) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def __eq__(self, other):
        if not isinstance(other, CoalgebraElement):
            return NotImplemented
        return self.terms == other.terms

    def __mul__(self, other: "CoalgebraElement") -> "CoalgebraElement":
        out = CoalgebraElement()
        for (l1, r1), c1 in self.terms.items():
            for (l2, r2), c2 in other.terms.items():
                out.add(_merge(l1, l2), _merge(r1, r2), c1 * c2)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items())

    def to_json(self) -> dict:
        return {
            "terms": [
                {"left": list(left), "right": list(right), "coeff": coeff}
                for (left, right), coeff in self.sorted_terms()
            ]
        }


def _merge(a: IsoClassLabel, b: IsoClassLabel) -> IsoClassLabel:
    return tuple(sorted(a + b, reverse=True))


def factorisations(f: FinMap):
    """All (h, e) with compose(h, e) == f, both legs surjective.

    h determines e on its image, so only h is enumerated; pairs where
    the induced e is not well defined (h does not refine the fibres of
    f) are skipped.
    """
    for mid in range(min(1, f.dom), f.dom + 1):
        for h in finskel.enumerate_surjections(f.dom, mid):
            vals = [0] * mid
            refines = True
            for j in range(f.dom):
                t = h.values[j]
                v = f.values[j]
                if vals[t - 1] == 0:
                    vals[t - 1] = v
                elif vals[t - 1] != v:
                    refines = False
                    break
            if not refines:
                continue
            e = FinMap(mid, f.cod, tuple(vals))
            if finskel.is_surjective(e):
                yield h, e


def comult(inst: OperadicInstance, f: FinMap) -> CoalgebraElement:
    """Sum of eta(h) (x) e over factorisations f = compose(h, e), e op."""
    _require_surjection_instance(inst)
    if f.dom and not finskel.is_surjective(f):
        raise ValueError(f"not a surjection: {f}")
    if not finskel.is_order_preserving(f):
        raise ValueError(f"comultiplication needs an order-preserving map, got {f}")
    out = CoalgebraElement()
    if f.dom == 0:
        out.add((), ())
        return out
    for h, e in factorisations(f):
        if not finskel.is_order_preserving(e):
            continue
        out.add(label(pita_general(inst, h).eta), label(e))
    return out


def bell_partial(n: int, k: int) -> dict[IsoClassLabel, int]:
    """Partitions of an n-set into k blocks, counted by block-size shape."""
    if n < 0 or k < 0:
        raise ShapeError(f"bell_partial needs n, k >= 0, got {n}, {k}")
    out: dict[IsoClassLabel, int] = {}
    if k == 0:
        if n == 0:
            out[()] = 1
        return out

    def descend(rest, largest, acc):
        if len(acc) == k:
            if rest == 0:
                shape = tuple(acc)
                denom = 1
                for part in shape:
                    denom *= factorial(part)
                for m in Counter(shape).values():
                    denom *= factorial(m)
                out[shape] = factorial(n) // denom
            return
        slots = k - len(acc) - 1
        for part in range(min(largest, rest - slots), 0, -1):
            descend(rest - part, part, acc + [part])

    descend(n, n, [])
    return out


def comult_closed_form(n: int) -> CoalgebraElement:
    """k!-weighted partial Bell expansion of the connected class A_n."""
    if n < 1:
        raise ShapeError(f"closed form defined for n >= 1, got {n}")
    out = CoalgebraElement()
    for k in range(1, n + 1):
        for shape, count in bell_partial(n, k).items():
            out.add(shape, (k,), factorial(k) * count)
    return out


def comult_composition_form(n: int) -> CoalgebraElement:
    """Partial Bell expansion without the k!, for contrast.

    This is the classical composition-of-series table; it first differs
    from comult_closed_form at n = 2.
    """
    if n < 1:
        raise ShapeError(f"composition form defined for n >= 1, got {n}")
    out = CoalgebraElement()
    for k in range(1, n + 1):
        for shape, count in bell_partial(n, k).items():
            out.add(shape, (k,), count)
    return out


def _terminal_surjection(inst: OperadicInstance, n: int) -> FinMap:
    return FinMap(n, 1, (1,) * n)


def verify_coassociativity(
    inst: OperadicInstance,
    bound: int,
    max_violations: int = 50,
    table: str = "incidence",
) -> Report:
    """(comult (x) id) after comult == (id (x) comult) after comult.

    Checked on every order-preserving surjection with domain up to the
    bound, expanding comult on labels multiplicatively. With the default
    incidence table (the k!-weighted one) the comparison FAILS, first at
    the fold of 2: the left iteration produces 2 on the slot
    (A_1^2, A_1^2, A_2) while the right produces 4. The defect is the
    automorphism order of the middle class, which unit-weight set-level
    counting cannot see; the report carries the witnesses rather than
    hiding them. Passing table="composition" runs the same comparison
    for the k!-free composition table, which is coassociative, as a
    control that the expansion machinery itself is sound.
    """
    _require_surjection_instance(inst)
    if table not in ("incidence", "composition"):
        raise ShapeError(f"unknown coefficient table {table!r}")
    rep = Report(
        f"coassociativity[{inst.name}, bound={bound}, table={table}]",
        max_violations=max_violations,
    )
    cache: dict[int, CoalgebraElement] = {}

    def generator(part: int) -> CoalgebraElement:
        if part not in cache:
            if table == "incidence":
                cache[part] = comult(inst, _terminal_surjection(inst, part))
            else:
                cache[part] = comult_composition_form(part)
        return cache[part]

    def expand(lab: IsoClassLabel) -> CoalgebraElement:
        out = CoalgebraElement()
        out.add((), ())
        for part in lab:
            out = out * generator(part)
        return out

    def base_element(f: FinMap) -> CoalgebraElement:
        if table == "incidence":
            return comult(inst, f)
        out = CoalgebraElement()
        out.add((), ())
        for part in label(f):
            out = out * generator(part)
        return out

    for m in range(0, bound + 1):
        for l in range(min(m, 1), m + 1):
            for f in finskel.enumerate_surjections(m, l):
                if not finskel.is_order_preserving(f):
                    continue
                rep.checks += 1
                base = base_element(f)
                lhs: Counter = Counter()
                rhs: Counter = Counter()
                for (left, right), coeff in base.terms.items():
                    for (l1, l2), c in expand(left).terms.items():
                        lhs[(l1, l2, right)] += coeff * c
                    for (r1, r2), c in expand(right).terms.items():
                        rhs[(left, r1, r2)] += coeff * c
                if +lhs != +rhs:
                    diff = sorted(
                        str(k)
                        for k in set(lhs) | set(rhs)
                        if lhs.get(k, 0) != rhs.get(k, 0)
                    )
                    rep.add(
                        "coassociativity",
                        {"f": _mj(f), "differing_slots": diff},
                        {str(k): v for k, v in sorted(lhs.items())},
                        {str(k): v for k, v in sorted(rhs.items())},
                    )
                    if len(rep.violations) >= max_violations:
                        return rep
    return rep


def verify_bialgebra(
    inst: OperadicInstance, bound: int, max_violations: int = 50
) -> Report:
    """comult(f (+) g) == comult(f) * comult(g), plus the empty unit."""
    _require_surjection_instance(inst)
    rep = Report(
        f"bialgebra[{inst.name}, bound={bound}]",
        max_violations=max_violations,
    )
    empty = comult(inst, FinMap(0, 0, ()))
    rep.checks += 1
    if empty.terms != {((), ()): 1}:
        rep.add("bialgebra-unit", None, empty.to_json(), {((), ()): 1})

    ops = []
    for m in range(1, bound + 1):
        for l in range(1, m + 1):
            ops.extend(
                f
                for f in finskel.enumerate_surjections(m, l)
                if finskel.is_order_preserving(f)
            )
    for f in ops:
        for g in ops:
            if f.dom + g.dom > bound:
                continue
            rep.checks += 1
            lhs = comult(inst, ordinal_sum(f, g))
            rhs = comult(inst, f) * comult(inst, g)
            if lhs != rhs:
                rep.add(
                    "bialgebra-multiplicativity",
                    {"f": _mj(f), "g": _mj(g)},
                    lhs.to_json(),
                    rhs.to_json(),
                )
                if len(rep.violations) >= max_violations:
                    return rep
    return rep


def verify_counit(
    inst: OperadicInstance, bound: int, max_violations: int = 50
) -> Report:
    """The identity-labelled right factor appears once, carrying f itself."""
    _require_surjection_instance(inst)
    rep = Report(
        f"counit[{inst.name}, bound={bound}]",
        max_violations=max_violations,
    )
    for m in range(1, bound + 1):
        for l in range(1, m + 1):
            for f in finskel.enumerate_surjections(m, l):
                if not finskel.is_order_preserving(f):
                    continue
                rep.checks += 1
                picked = [
                    (left, coeff)
                    for (left, right), coeff in comult(inst, f).terms.items()
                    if right == (1,) * len(right)
                ]
                if picked != [(label(f), 1)]:
                    rep.add("counit", _mj(f), picked, [(label(f), 1)])
                    if len(rep.violations) >= max_violations:
                        return rep
    return rep


_mj = finskel.finmap_to_json


@dataclass
class FactorisationGroupoid:
    """Both fibres of the composition face over a 2-chain (f, bottom).

    C_1 objects are the factorisations (h, e) of f that keep the
    extended 3-chain locally order-preserving, so compose(e, bottom)
    must be op. C_2 objects are the factorisations of eta(f) with op
    second leg. Morphisms of C_1 are middle quasibijections; C_2 is
    checked to be discrete rather than assumed.
    """

    inst: OperadicInstance
    f: FinMap
    bottom: FinMap

    def __post_init__(self):
        if self.bottom.dom != self.f.cod:
            raise ShapeError(
                f"bottom map must start at cod(f) = {self.f.cod}, "
                f"got dom {self.bottom.dom}"
            )
        if not finskel.is_order_preserving(compose(self.f, self.bottom)):
            raise ShapeError("the chain (f, bottom) is not locally order-preserving")
        if not finskel.is_order_preserving(self.bottom):
            raise ShapeError("the chain (f, bottom) is not locally order-preserving")

    @property
    def c1_objects(self) -> list[tuple[FinMap, FinMap]]:
        return [
            (h, e)
            for h, e in factorisations(self.f)
            if finskel.is_order_preserving(compose(e, self.bottom))
        ]

    @property
    def c2_objects(self) -> list[tuple[FinMap, FinMap]]:
        target = pita_general(self.inst, self.f).eta
        return [
            (h, e)
            for h, e in factorisations(target)
            if finskel.is_order_preserving(e)
        ]

    def is_c1_morphism(self, sigma: FinMap, x, y) -> bool:
        """Do the two triangles commute and the square over (e_x, e_y) lie fop?"""
        h1, e1 = x
        h2, e2 = y
        if sigma.dom != e1.dom or sigma.cod != e2.dom:
            return False
        if compose(h1, sigma) != h2 or compose(sigma, e2) != e1:
            return False
        try:
            return is_fop_square(
                sigma, identity(self.f.cod), e1, e2, self.inst
            )
        except ShapeError:
            return False

    def c1_morphisms(self, x, y):
        h1, e1 = x
        h2, e2 = y
        if e1.dom != e2.dom:
            return []
        return [
            sigma
            for sigma in quasibijections(self.inst, e1.dom, e2.dom)
            if self.is_c1_morphism(sigma, x, y)
        ]

    def c1_iso_classes(self) -> list[list[tuple[FinMap, FinMap]]]:
        objs = self.c1_objects
        parent = list(range(len(objs)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(len(objs)):
            for j in range(i + 1, len(objs)):
                if find(i) == find(j):
                    continue
                if self.c1_morphisms(objs[i], objs[j]):
                    parent[find(i)] = find(j)
        classes: dict[int, list] = {}
        for i, obj in enumerate(objs):
            classes.setdefault(find(i), []).append(obj)
        return list(classes.values())

    def c2_is_discrete(self) -> bool:
        objs = self.c2_objects
        eta_f = pita_general(self.inst, self.f).eta
        for x in objs:
            for y in objs:
                h1, e1 = x
                h2, e2 = y
                if e1.dom != e2.dom:
                    continue
                for sigma in quasibijections(self.inst, e1.dom, e2.dom):
                    if compose(h1, sigma) != h2 or compose(sigma, e2) != e1:
                        continue
                    if not is_fop_square(
                        sigma, identity(eta_f.cod), e1, e2, self.inst
                    ):
                        continue
                    if x != y or not finskel.is_identity(sigma):
                        return False
        return True

    def forward(self, x) -> tuple[FinMap, FinMap]:
        """C_1 -> C_2, the top face: relative op part over the op part."""
        h, e = x
        return (eta_rel(self.inst, h, e), pita_general(self.inst, e).eta)

    def backward(self, y) -> tuple[FinMap, FinMap]:
        """C_2 -> C_1, precompose with the permutation part of f."""
        h, e = y
        return (compose(pita_general(self.inst, self.f).pi, h), e)

    def unit_at(self, x) -> FinMap:
        """The C_1 morphism x -> backward(forward(x))."""
        _, e = x
        return pita_general(self.inst, e).pi


def _verify_fibre_pair(rep, groupoid, where, max_violations):
    """Shared n = 0 checks: F after G, unit, discreteness, class count."""
    inst = groupoid.inst
    c2 = groupoid.c2_objects
    for y in c2:
        rep.checks += 1
        back = groupoid.backward(y)
        if groupoid.forward(back) != y:
            rep.add(
                "fibre-retraction",
                {**where, "object": [_mj(y[0]), _mj(y[1])]},
                [_mj(m) for m in groupoid.forward(back)],
                [_mj(m) for m in y],
            )
            if len(rep.violations) >= max_violations:
                return
        if not finskel.is_order_preserving(
            compose(back[1], groupoid.bottom)
        ):
            rep.add(
                "fibre-backward-leaves-fibre",
                {**where, "object": [_mj(y[0]), _mj(y[1])]},
                _mj(back[1]),
                "compose(e, bottom) op",
            )
            if len(rep.violations) >= max_violations:
                return
    rep.checks += 1
    if not groupoid.c2_is_discrete():
        rep.add("fibre-c2-not-discrete", where, "morphisms found", "discrete")
        if len(rep.violations) >= max_violations:
            return
    objs = groupoid.c1_objects
    for x in objs:
        rep.checks += 1
        unit = groupoid.unit_at(x)
        target = groupoid.backward(groupoid.forward(x))
        if not groupoid.is_c1_morphism(unit, x, target):
            rep.add(
                "fibre-unit-not-a-morphism",
                {**where, "object": [_mj(x[0]), _mj(x[1])]},
                _mj(unit),
                "a C_1 morphism to backward(forward(x))",
            )
            if len(rep.violations) >= max_violations:
                return
        if not finskel.is_bijective(unit) or not groupoid.is_c1_morphism(
            inverse(unit), target, x
        ):
            rep.add(
                "fibre-unit-not-invertible",
                {**where, "object": [_mj(x[0]), _mj(x[1])]},
                _mj(unit),
                "invertible",
            )
            if len(rep.violations) >= max_violations:
                return
    rep.checks += 1
    classes = groupoid.c1_iso_classes()
    if len(classes) != len(c2):
        rep.add("fibre-class-count", where, len(classes), len(c2))


def _chain_fibre_objects(inst, p3, p2, p1):
    """Factorisations of p3 keeping the extended 4-chain locally op."""
    lower = compose(p2, p1)
    return [
        (g4, g3)
        for g4, g3 in factorisations(p3)
        if finskel.is_order_preserving(compose(g3, lower))
    ]


def _chain_cofibre_objects(inst, p3, p2):
    """Factorisations of eta_rel(p3, p2) with compose(h2, eta(p2)) op."""
    rel = eta_rel(inst, p3, p2)
    eta_p2 = pita_general(inst, p2).eta
    return [
        (h3, h2)
        for h3, h2 in factorisations(rel)
        if finskel.is_order_preserving(compose(h2, eta_p2))
    ]


def _verify_chain_fibre(rep, inst, p3, p2, p1, where, max_violations):
    """The n = 1 analogue: the same comparison one chain level up.

    Morphism squares run over the composites down to the second object
    from the bottom (the second leg followed by p2), the exact depth at
    which the reflected comparison chain still lives; one level deeper
    the bottom map folds the fibres together and the unit stops being a
    morphism, one level shallower distinct comparison classes merge.
    """
    top = compose(p3, p2)
    pi_top = pita_general(inst, top).pi
    eta_p2 = pita_general(inst, p2).eta
    pi_p2 = pita_general(inst, p2).pi

    def forward(x):
        g4, g3 = x
        return (
            eta_rel(inst, g4, compose(g3, p2)),
            eta_rel(inst, g3, p2),
        )

    def backward(y):
        h3, h2 = y
        return (compose(pi_top, h3), compose(h2, inverse(pi_p2)))

    def is_morphism(sigma, x, y):
        g4a, g3a = x
        g4b, g3b = y
        if sigma.dom != g3a.dom or sigma.cod != g3b.dom:
            return False
        if compose(g4a, sigma) != g4b or compose(sigma, g3b) != g3a:
            return False
        try:
            return is_fop_square(
                sigma,
                identity(p2.cod),
                compose(g3a, p2),
                compose(g3b, p2),
                inst,
            )
        except ShapeError:
            return False

    c1 = _chain_fibre_objects(inst, p3, p2, p1)
    c2 = _chain_cofibre_objects(inst, p3, p2)

    rep.checks += 1
    discrete = True
    for x in c2:
        for y in c2:
            h3a, h2a = x
            h3b, h2b = y
            if h2a.dom != h2b.dom:
                continue
            for sigma in quasibijections(inst, h2a.dom, h2b.dom):
                if compose(h3a, sigma) != h3b or compose(sigma, h2b) != h2a:
                    continue
                if not is_fop_square(
                    sigma,
                    identity(eta_p2.cod),
                    compose(h2a, eta_p2),
                    compose(h2b, eta_p2),
                    inst,
                ):
                    continue
                if x != y or not finskel.is_identity(sigma):
                    discrete = False
    if not discrete:
        rep.add("chain-fibre-c2-not-discrete", where, "morphisms found", "discrete")
        if len(rep.violations) >= max_violations:
            return

    for y in c2:
        rep.checks += 1
        back = backward(y)
        if compose(back[0], back[1]) != p3 or forward(back) != y:
            rep.add(
                "chain-fibre-retraction",
                {**where, "object": [_mj(y[0]), _mj(y[1])]},
                [_mj(m) for m in forward(back)],
                [_mj(m) for m in y],
            )
            if len(rep.violations) >= max_violations:
                return

    parent = list(range(len(c1)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, x in enumerate(c1):
        rep.checks += 1
        unit = pita_general(inst, compose(x[1], p2)).pi
        target = backward(forward(x))
        if not is_morphism(unit, x, target) or not finskel.is_bijective(unit):
            rep.add(
                "chain-fibre-unit",
                {**where, "object": [_mj(x[0]), _mj(x[1])]},
                _mj(unit),
                "an invertible morphism to backward(forward(x))",
            )
            if len(rep.violations) >= max_violations:
                return
        for j in range(i + 1, len(c1)):
            if find(i) == find(j):
                continue
            g3a, g3b = x[1], c1[j][1]
            if g3a.dom != g3b.dom:
                continue
            if any(
                is_morphism(sigma, x, c1[j])
                for sigma in quasibijections(inst, g3a.dom, g3b.dom)
            ):
                parent[find(i)] = find(j)

    rep.checks += 1
    n_classes = len({find(i) for i in range(len(c1))})
    if n_classes != len(c2):
        rep.add("chain-fibre-class-count", where, n_classes, len(c2))


def verify_decomposition_fibres(
    inst: OperadicInstance, bound: int, max_violations: int = 50
) -> Report:
    """Fibre comparison across all desk-scale chains.

    Runs the n = 0 check on every locally order-preserving 2-chain with
    objects up to the bound and on every fold m -> 1 with m <= bound,
    then the n = 1 analogue on every locally order-preserving 3-chain
    with objects up to min(bound, 3).
    """
    _require_surjection_instance(inst)
    rep = Report(
        f"decomposition-fibres[{inst.name}, bound={bound}]",
        max_violations=max_violations,
    )

    seen = set()
    for m in range(1, bound + 1):
        seen.add((_terminal_surjection(inst, m), identity(1)))
    two_chain_bound = min(bound, 3)
    for t1 in range(1, two_chain_bound + 1):
        for t0 in range(1, t1 + 1):
            for btm in finskel.enumerate_surjections(t1, t0):
                if not finskel.is_order_preserving(btm):
                    continue
                for t2 in range(t1, two_chain_bound + 1):
                    for f in finskel.enumerate_surjections(t2, t1):
                        if finskel.is_order_preserving(compose(f, btm)):
                            seen.add((f, btm))
    for f, btm in sorted(seen, key=lambda p: (p[0].dom, p[0].values, p[1].values)):
        where = {"f": _mj(f), "bottom": _mj(btm)}
        groupoid = FactorisationGroupoid(inst, f, btm)
        _verify_fibre_pair(rep, groupoid, where, max_violations)
        if len(rep.violations) >= max_violations:
            return rep

    chain_bound = min(bound, 3)
    for t0 in range(1, chain_bound + 1):
        for t1 in range(t0, chain_bound + 1):
            for p1 in finskel.enumerate_surjections(t1, t0):
                if not finskel.is_order_preserving(p1):
                    continue
                for t2 in range(t1, chain_bound + 1):
                    for p2 in finskel.enumerate_surjections(t2, t1):
                        if not finskel.is_order_preserving(compose(p2, p1)):
                            continue
                        for t3 in range(t2, chain_bound + 1):
                            for p3 in finskel.enumerate_surjections(t3, t2):
                                if not finskel.is_order_preserving(
                                    compose(p3, compose(p2, p1))
                                ):
                                    continue
                                where = {
                                    "p3": _mj(p3),
                                    "p2": _mj(p2),
                                    "p1": _mj(p1),
                                }
                                _verify_chain_fibre(
                                    rep, inst, p3, p2, p1, where, max_violations
                                )
                                if len(rep.violations) >= max_violations:
                                    return rep
    return rep
