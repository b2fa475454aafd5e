"""Chains, ladders and the top-lax simplicial structure.

A chain is a finite composable string of morphisms drawn as running down
to a bottom object; it is locally order-preserving when every composite
down to the bottom is an op morphism. Ladders (FopDiagram) are the
morphisms between chains: levelwise quasibijections, commuting squares,
and every horizontal fibrewise order-preserving with respect to the
bottom one over the composite verticals.

The face operators compose a chain at an inner object or drop the top;
the missing last face is the top face, which drops the bottom map and
reflects the remainder back into the locally order-preserving world. The
only simplicial identity that survives just up to a cell is the one
comparing the two double-top-faces; its mediating ladders (beta) are
built from the unique lift property: a locally order-preserving chain
plus a quasibijection out of its bottom object determine a unique ladder.
Three verifiers sweep all of this exhaustively below a bound.

Indexing: a chain of length n has faces 0..n-1 plus the top face, and
degeneracies 0..n. face(0) drops the top object; face(i) composes at the
i-th object from the top. In the standard numbering where vertex 0 is
the top, face(i) is the i-th face and the top face is face n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from . import finskel
from .errors import IntegrityError, PitaError, ShapeError
from .factorisation import eta_rel, pita_general, reflect_chain
from .finskel import FinMap
from .opcat import (
    OperadicInstance,
    Report,
    is_fop_square,
    is_op_morphism,
    is_quasibijection,
    quasibijections,
)

_mj = finskel.finmap_to_json


@dataclass(frozen=True)
class Chain:
    """A composable string of morphisms, top object first.

    objects = (T_n, ..., T_0) and maps = (f_n, ..., f_1) with
    f_k: T_k -> T_{k-1}, so maps[j] runs from objects[j] to objects[j+1].
    """

    inst: OperadicInstance
    objects: tuple
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "maps", tuple(self.maps))
        if len(self.objects) != len(self.maps) + 1:
            raise ShapeError("a chain needs one more object than maps")
        for j, f in enumerate(self.maps):
            card = self.inst.cardinality(f)
            if card.dom != self.inst.cardinality(self.objects[j]):
                raise ShapeError(f"map {j} does not start at object {j}")
            if card.cod != self.inst.cardinality(self.objects[j + 1]):
                raise ShapeError(f"map {j} does not end at object {j + 1}")

    @property
    def length(self) -> int:
        return len(self.maps)

    @cached_property
    def _down(self):
        acc = self.inst.identity(self.objects[-1])
        out = [acc]
        for f in reversed(self.maps):
            acc = self.inst.compose(f, acc)
            out.append(acc)
        return tuple(out)

    def down_composite(self, k: int) -> FinMap:
        """Composite of the bottom k maps (k=0 gives the identity)."""
        if not 0 <= k <= self.length:
            raise IndexError(f"no composite of {k} maps in a chain of {self.length}")
        return self._down[k]

    @cached_property
    def locally_op(self) -> bool:
        return all(is_op_morphism(d, self.inst) for d in self._down[1:])


def chain_to_json(chain: Chain) -> dict:
    return {
        "objects": [int(X) for X in chain.objects],
        "maps": [_mj(f) for f in chain.maps],
    }


def chain_from_json(inst: OperadicInstance, data: dict) -> Chain:
    return Chain(
        inst,
        tuple(data["objects"]),
        tuple(finskel.finmap_from_json(m) for m in data["maps"]),
    )


@dataclass(frozen=True)
class FopDiagram:
    """A ladder between two chains of the same length: horizontals
    (sigma_n, ..., sigma_0) aligned with the objects, source maps on the
    left, target maps on the right."""

    source: Chain
    target: Chain
    horizontals: tuple

    def __post_init__(self):
        object.__setattr__(self, "horizontals", tuple(self.horizontals))
        n = self.source.length
        if self.target.length != n:
            raise ShapeError("ladder endpoints have different lengths")
        if len(self.horizontals) != n + 1:
            raise ShapeError("a ladder needs one horizontal per object")
        inst = self.source.inst
        for j, s in enumerate(self.horizontals):
            card = inst.cardinality(s)
            if card.dom != inst.cardinality(self.source.objects[j]):
                raise ShapeError(f"horizontal {j} does not start on the source")
            if card.cod != inst.cardinality(self.target.objects[j]):
                raise ShapeError(f"horizontal {j} does not end on the target")

    @property
    def bottom(self) -> FinMap:
        return self.horizontals[-1]

    def is_valid(self) -> bool:
        """Quasibijective horizontals, commuting squares, and every
        horizontal fibrewise order-preserving with respect to the bottom
        one over the composite verticals."""
        inst = self.source.inst
        n = self.source.length
        sig = self.horizontals
        if not all(is_quasibijection(s, inst) for s in sig):
            return False
        for j in range(n):
            if inst.compose(sig[j], self.target.maps[j]) != inst.compose(
                self.source.maps[j], sig[j + 1]
            ):
                return False
        for j in range(n):
            try:
                if not is_fop_square(
                    sig[j],
                    sig[-1],
                    self.source.down_composite(n - j),
                    self.target.down_composite(n - j),
                    inst,
                ):
                    return False
            except ShapeError:
                return False
        return True


@dataclass(frozen=True)
class BetaComponent:
    """The mediating cell at a chain of length n+2: a ladder between the
    two ways of taking both top-most faces, determined by its bottom
    quasibijection (the quasibijection part of the second-from-bottom
    map)."""

    chain: Chain
    n: int
    ladder: FopDiagram


def identity_ladder(chain: Chain) -> FopDiagram:
    inst = chain.inst
    return FopDiagram(
        chain, chain, tuple(inst.identity(X) for X in chain.objects)
    )


# ------------------------------------------------------------ enumeration


def _all_chains(inst: OperadicInstance, n: int, bound: int, locally_op: bool):
    objs = list(inst.objects(bound))
    level = [Chain(inst, (X,), ()) for X in objs]
    for _ in range(n):
        nxt = []
        for c in level:
            T = c.objects[0]
            full = c.down_composite(c.length)
            for X in objs:
                for f in inst.hom(X, T):
                    if locally_op and not is_op_morphism(
                        inst.compose(f, full), inst
                    ):
                        continue
                    nxt.append(Chain(inst, (X,) + c.objects, (f,) + c.maps))
        level = nxt
    return level


def enumerate_p(inst: OperadicInstance, n: int, bound: int):
    """All locally order-preserving n-chains with objects below the
    bound, exhaustively and deterministically."""
    if n < 0 or bound < 1:
        raise ShapeError("need n >= 0 and bound >= 1")
    yield from _all_chains(inst, n, bound, locally_op=True)


# ------------------------------------------------- simplicial operators


def face(i: int, chain: Chain) -> Chain:
    """Drop the top object (i=0) or compose at the i-th object from the
    top (1 <= i <= n-1). The missing last face is top_face."""
    n = chain.length
    if not 0 <= i <= n - 1:
        raise IndexError(f"face {i} undefined on a chain of length {n}")
    if i == 0:
        return Chain(chain.inst, chain.objects[1:], chain.maps[1:])
    merged = chain.inst.compose(chain.maps[i - 1], chain.maps[i])
    return Chain(
        chain.inst,
        chain.objects[:i] + chain.objects[i + 1 :],
        chain.maps[: i - 1] + (merged,) + chain.maps[i + 1 :],
    )


def top_face(chain: Chain) -> Chain:
    """Drop the bottom object and map, then reflect the remainder back
    into the locally order-preserving chains."""
    n = chain.length
    if n < 1:
        raise IndexError("top face needs a chain of length at least 1")
    trunc = Chain(chain.inst, chain.objects[:-1], chain.maps[:-1])
    return reflect_chain(chain.inst, trunc)[0]


def degeneracy(i: int, chain: Chain) -> Chain:
    """Duplicate the i-th object from the top by inserting an identity."""
    n = chain.length
    if not 0 <= i <= n:
        raise IndexError(f"degeneracy {i} undefined on a chain of length {n}")
    ident = chain.inst.identity(chain.objects[i])
    return Chain(
        chain.inst,
        chain.objects[: i + 1] + chain.objects[i:],
        chain.maps[:i] + (ident,) + chain.maps[i:],
    )


# ------------------------------------------------------------ the lifts


def opfibration_lift(chain: Chain, sigma0: FinMap) -> FopDiagram:
    """The unique ladder out of a locally order-preserving chain with the
    given bottom quasibijection: the k-th horizontal is the
    quasibijection part of the k-th down-composite pushed through the
    bottom, and the k-th target map is the relative op part of the k-th
    source map over the pushed continuation."""
    inst = chain.inst
    if not chain.locally_op:
        raise ShapeError("lifts start from locally order-preserving chains")
    card = inst.cardinality(sigma0)
    if card.dom != inst.cardinality(chain.objects[-1]):
        raise ShapeError("bottom map does not start at the bottom object")
    if not is_quasibijection(sigma0, inst):
        raise ShapeError("bottom map must be a quasibijection")
    n = chain.length
    horizontals = [sigma0]
    new_maps = []
    pushed = sigma0
    for k in range(1, n + 1):
        hk = chain.maps[n - k]
        new_maps.append(eta_rel(inst, hk, pushed))
        pushed = inst.compose(hk, pushed)
        horizontals.append(pita_general(inst, pushed).pi)
    target = Chain(
        inst,
        chain.objects[:-1] + (card.cod,),
        tuple(reversed(new_maps)),
    )
    return FopDiagram(chain, target, tuple(reversed(horizontals)))


def compose_ladders(first: FopDiagram, second: FopDiagram) -> FopDiagram:
    """Horizontal composite: apply the first ladder, then the second."""
    if first.target != second.source:
        raise ShapeError("ladders do not meet end to end")
    inst = first.source.inst
    return FopDiagram(
        first.source,
        second.target,
        tuple(
            inst.compose(a, b)
            for a, b in zip(first.horizontals, second.horizontals)
        ),
    )


def ladder_top_face(ladder: FopDiagram) -> FopDiagram:
    """Top face of a ladder between locally order-preserving chains: drop
    the bottom square and reflect both sides; the result is the unique
    lift of the second-from-bottom horizontal."""
    if ladder.source.length < 1:
        raise IndexError("top face needs ladders of length at least 1")
    lifted = opfibration_lift(top_face(ladder.source), ladder.horizontals[-2])
    expected = top_face(ladder.target)
    if lifted.target != expected:
        raise IntegrityError("ladder top face missed the reflected target")
    return lifted


def beta(n: int, chain: Chain, mode: str = "production") -> BetaComponent:
    """The mediating cell at a chain of length n+2, as the unique ladder
    with bottom the quasibijection part of the second-from-bottom map,
    from the top face of the last inner face to the double top face.
    Oracle mode recomputes every horizontal from the direct pattern (the
    quasibijection part of each op down-composite pushed through the
    bottom) and insists they agree."""
    if chain.length != n + 2:
        raise ShapeError(f"beta {n} lives on chains of length {n + 2}")
    if not chain.locally_op:
        raise ShapeError("beta lives on locally order-preserving chains")
    inst = chain.inst
    sigma0 = pita_general(inst, chain.maps[-2]).pi
    source = top_face(face(n + 1, chain))
    ladder = opfibration_lift(source, sigma0)
    expected = top_face(top_face(chain))
    if ladder.target != expected:
        raise IntegrityError("beta ladder missed the double top face")
    if mode == "oracle":
        above = Chain(inst, chain.objects[:-2], chain.maps[:-2])
        for k in range(n + 1):
            pushed = inst.compose(
                pita_general(inst, above.down_composite(k)).eta, sigma0
            )
            direct = pita_general(inst, pushed).pi
            if ladder.horizontals[n - k] != direct:
                raise IntegrityError(
                    f"beta horizontal {k} differs from the direct pattern"
                )
    elif mode != "production":
        raise ShapeError(f"unknown mode {mode!r}")
    return BetaComponent(chain=chain, n=n, ladder=ladder)


# ------------------------------------------------------------- verifiers


def verify_strict_identities(
    inst: OperadicInstance, bound: int, maxlen: int, max_violations: int = 50
) -> Report:
    """Exhaustively check, on all locally order-preserving chains up to
    maxlen below the bound, every simplicial identity except the
    double-top-face one: face-face, face-degeneracy,
    degeneracy-degeneracy, the three families mixing the top face with
    faces and degeneracies, the locally order-preserving postcondition of
    the top face, and naturality and idempotence of the reflection on
    arbitrary chains (lengths 1 and 2)."""
    rep = Report(
        f"strict-identities[{inst.name}, bound={bound}, maxlen={maxlen}]",
        max_violations=max_violations,
    )

    def bad(tag, chain, extra=None):
        witness = {"chain": chain_to_json(chain)}
        if extra:
            witness.update(extra)
        rep.add(tag, witness, "differs", "equal chains")

    for n in range(1, maxlen + 1):
        for c in enumerate_p(inst, n, bound):
            rep.checks += 1
            if not top_face(c).locally_op:
                bad("top-face-not-locally-op", c)
            for j in range(n):
                for i in range(j):
                    rep.checks += 1
                    if face(i, face(j, c)) != face(j - 1, face(i, c)):
                        bad("face-face", c, {"i": i, "j": j})
            for i in range(n - 1):
                rep.checks += 1
                if face(i, top_face(c)) != top_face(face(i, c)):
                    bad("face-top-face", c, {"i": i})
            for j in range(n + 1):
                d = degeneracy(j, c)
                for i in range(n + 1):
                    rep.checks += 1
                    got = face(i, d)
                    if i in (j, j + 1):
                        expect = c
                    elif i < j:
                        expect = degeneracy(j - 1, face(i, c))
                    else:
                        expect = degeneracy(j, face(i - 1, c))
                    if got != expect:
                        bad("face-degeneracy", c, {"i": i, "j": j})
                rep.checks += 1
                got = top_face(d)
                expect = c if j == n else degeneracy(j, top_face(c))
                if got != expect:
                    bad(
                        "top-face-bottom-degeneracy"
                        if j == n
                        else "degeneracy-top-face",
                        c,
                        {"j": j},
                    )
                for i in range(j + 1):
                    rep.checks += 1
                    if degeneracy(i, d) != degeneracy(j + 1, degeneracy(i, c)):
                        bad("degeneracy-degeneracy", c, {"i": i, "j": j})

    # reflection on arbitrary chains: idempotence, the unit ladder, and
    # naturality along every conjugating ladder of quasibijections
    for n in range(1, min(maxlen, 2) + 1):
        for c in _all_chains(inst, n, bound, locally_op=False):
            rep.checks += 1
            rc, unit = reflect_chain(inst, c)
            if not rc.locally_op:
                bad("reflection-not-locally-op", c)
            if reflect_chain(inst, rc)[0] != rc:
                bad("reflection-idempotent", c)
            if unit.source != c or unit.target != rc or not unit.is_valid():
                bad("reflection-unit-invalid", c)
            perms = [quasibijections(inst, X, X) for X in c.objects]
            for sig in itertools.product(*perms):
                maps2 = []
                ok = True
                for j in range(n):
                    g = inst.compose(
                        finskel.inverse(sig[j]),
                        inst.compose(c.maps[j], sig[j + 1]),
                    )
                    if g not in inst.hom(c.objects[j], c.objects[j + 1]):
                        ok = False
                        break
                    maps2.append(g)
                if not ok:
                    continue
                c2 = Chain(inst, c.objects, tuple(maps2))
                ladder = FopDiagram(c, c2, sig)
                if not ladder.is_valid():
                    continue
                rep.checks += 1
                rc2, unit2 = reflect_chain(inst, c2)
                lifted = opfibration_lift(rc, sig[-1])
                mismatch = lifted.target != rc2
                for j in range(n + 1):
                    if inst.compose(
                        unit.horizontals[j], lifted.horizontals[j]
                    ) != inst.compose(sig[j], unit2.horizontals[j]):
                        mismatch = True
                if mismatch:
                    bad(
                        "reflection-naturality",
                        c,
                        {"horizontals": [_mj(s) for s in sig]},
                    )
    return rep


def verify_beta_coherence(
    inst: OperadicInstance, bound: int, max_violations: int = 50
) -> Report:
    """Check the mediating cells below the bound: the direct scalar form
    of the lowest coherence equation on locally order-preserving
    3-chains, the ladder form of the coherence equation on 3- and
    4-chains, agreement of the lift construction with the direct
    horizontal pattern, and triviality of the cells at bottom-degenerate
    chains."""
    rep = Report(
        f"beta-coherence[{inst.name}, bound={bound}]",
        max_violations=max_violations,
    )

    def w(chain):
        return {"chain": chain_to_json(chain)}

    for m, length in ((0, 2), (1, 3)):
        for c in enumerate_p(inst, length, bound):
            rep.checks += 1
            try:
                beta(m, c, mode="oracle")
            except PitaError as exc:
                rep.add(f"beta-{m}-construction", w(c), str(exc), "agreement")

    for c in enumerate_p(inst, 3, bound):
        f3, f2 = c.maps[0], c.maps[1]
        rep.checks += 1
        direct_l = inst.compose(
            pita_general(inst, inst.compose(f3, f2)).pi,
            pita_general(inst, eta_rel(inst, f3, f2)).pi,
        )
        direct_r = inst.compose(
            pita_general(inst, f3).pi,
            pita_general(
                inst,
                inst.compose(
                    pita_general(inst, f3).eta, pita_general(inst, f2).pi
                ),
            ).pi,
        )
        if direct_l != direct_r:
            rep.add("coherence-0-direct", w(c), _mj(direct_l), _mj(direct_r))
        rep.checks += 1
        try:
            lhs = compose_ladders(
                beta(0, face(1, c)).ladder, beta(0, top_face(c)).ladder
            )
            rhs = compose_ladders(
                beta(0, face(2, c)).ladder,
                ladder_top_face(beta(1, c).ladder),
            )
        except PitaError as exc:
            rep.add("coherence-0-error", w(c), str(exc), "composable cells")
            continue
        if lhs != rhs:
            rep.add("coherence-0", w(c), "differs", "equal ladders")
        elif lhs.horizontals[0] != direct_l:
            rep.add("coherence-0-cross", w(c), _mj(lhs.horizontals[0]), _mj(direct_l))

    for c in enumerate_p(inst, 4, bound):
        rep.checks += 1
        try:
            lhs = compose_ladders(
                beta(1, face(2, c)).ladder, beta(1, top_face(c)).ladder
            )
            rhs = compose_ladders(
                beta(1, face(3, c)).ladder,
                ladder_top_face(beta(2, c).ladder),
            )
        except PitaError as exc:
            rep.add("coherence-1-error", w(c), str(exc), "composable cells")
            continue
        if lhs != rhs:
            rep.add("coherence-1", w(c), "differs", "equal ladders")

    for m in (0, 1):
        for c in enumerate_p(inst, m + 1, bound):
            rep.checks += 1
            bc = beta(m, degeneracy(m + 1, c))
            if bc.ladder != identity_ladder(bc.ladder.source):
                rep.add(
                    "beta-at-bottom-degeneracy",
                    w(c),
                    "a nontrivial ladder",
                    "the identity ladder",
                )
    return rep


def verify_opfibration(
    inst: OperadicInstance, n: int, bound: int, max_violations: int = 50
) -> Report:
    """For every locally order-preserving n-chain and every
    quasibijection out of its bottom object: the constructed lift is a
    valid ladder into a locally order-preserving chain, and brute-force
    enumeration of all candidate ladders over that quasibijection finds
    exactly the constructed one."""
    rep = Report(
        f"opfibration[{inst.name}, n={n}, bound={bound}]",
        max_violations=max_violations,
    )
    for chain in enumerate_p(inst, n, bound):
        T0 = chain.objects[-1]
        for sigma0 in quasibijections(inst, T0, T0):
            rep.checks += 1
            witness = {
                "chain": chain_to_json(chain), "sigma0": _mj(sigma0),
            }
            lift = opfibration_lift(chain, sigma0)
            if not lift.is_valid() or not lift.target.locally_op:
                rep.add(
                    "opfibration-lift-invalid", witness,
                    "an invalid ladder", "a valid ladder",
                )
            found = _lift_candidates(chain, sigma0)
            if len(found) != 1:
                rep.add("opfibration-lift-count", witness, len(found), 1)
            elif found[0] != lift:
                rep.add(
                    "opfibration-lift-mismatch", witness,
                    "a different ladder", "the constructed lift",
                )
    return rep


def _lift_candidates(chain: Chain, sigma0: FinMap):
    """All valid ladders out of the chain with the given bottom, by brute
    force over quasibijection tuples (targets are determined by
    conjugation)."""
    inst = chain.inst
    n = chain.length
    perms = [quasibijections(inst, X, X) for X in chain.objects[:-1]]
    out = []
    for upper in itertools.product(*perms):
        sig = upper + (sigma0,)
        maps2 = []
        ok = True
        for j in range(n):
            g = inst.compose(
                finskel.inverse(sig[j]),
                inst.compose(chain.maps[j], sig[j + 1]),
            )
            if g not in inst.hom(chain.objects[j], chain.objects[j + 1]):
                ok = False
                break
            maps2.append(g)
        if not ok:
            continue
        target = Chain(
            inst,
            chain.objects[:-1] + (inst.cardinality(sigma0).cod,),
            tuple(maps2),
        )
        if not target.locally_op:
            continue
        ladder = FopDiagram(chain, target, sig)
        if ladder.is_valid():
            out.append(ladder)
    return out
