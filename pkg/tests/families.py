"""Instance families shared by the distortion property tests."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from fqcover.bounds import lemma31_rhs
from fqcover.covering import (Congruence, CoveringInstance, check_cover_exhaustive,
                              congruence_masks, lcm_modulus)
from fqcover.distortion import DeltaSchedule, decompose, distortion_verdict, projection_classes
from fqcover.finite_field import enumerate_residues, field_make, monic_polys


@dataclass
class Member:
    instance: CoveringInstance
    s: int  # smallest multiplicity among the instances sharing this behaviour
    size: int  # how many instances the member stands for


def _divisor_moduli(Q, chain):
    out = []
    for d in range(1, Q.degree + 1):
        for m in monic_polys(Q.field, d):
            if not (Q % m):
                out.append(m)
    return out


def exhaustive_f2(max_deg: int = 4, max_size: int = 4) -> list[Member]:
    """Every set of at most ``max_size`` congruences over F_2 with deg lcm <= ``max_deg``.

    Sets whose lcm Q and per-step covered sets agree give identical runs of
    the distortion pipeline and identical coverage, so each such group is
    represented once, carrying the smallest multiplicity seen in it.
    """
    F = field_make(2)
    members = []
    for d in range(1, max_deg + 1):
        for Q in monic_polys(F, d):
            chain = decompose(Q)
            moduli = _divisor_moduli(Q, chain)
            cong, step, vec = [], [], []
            for m in moduli:
                j = next(i for i in range(1, chain.J + 1) if not (chain.partials[i] % m))
                e = tuple(_valuation(m, P) for P in chain.primes)
                for r in enumerate_residues(m):
                    cong.append(Congruence(r, m))
                    step.append(j)
                    vec.append(e)
            masks = congruence_masks(cong, Q)
            bits = [int("".join("1" if b else "0" for b in mk[::-1]), 2) for mk in masks]
            full = chain.exponents
            groups: dict[tuple, list] = {}
            mod_id = [moduli.index(c.modulus) for c in cong]
            for size in range(1, max_size + 1):
                for combo in combinations(range(len(cong)), size):
                    lcm = tuple(max(vec[i][k] for i in combo) for k in range(chain.J))
                    if lcm != full:
                        continue
                    key = [0] * chain.J
                    for i in combo:
                        key[step[i] - 1] |= bits[i]
                    key = tuple(key)
                    ids = [mod_id[i] for i in combo]
                    s = max(ids.count(x) for x in set(ids))
                    g = groups.get(key)
                    if g is None:
                        groups[key] = [combo, s, 1]
                    else:
                        g[2] += 1
                        if s < g[1]:
                            g[0], g[1] = combo, s
            for combo, s, n in groups.values():
                members.append(Member(CoveringInstance(F, tuple(cong[i] for i in combo)), s, n))
    return members


def _valuation(m, P) -> int:
    v = 0
    while m.degree >= P.degree and not (m % P):
        m = m // P
        v += 1
    return v


@lru_cache(maxsize=4)
def random_family(n: int = 1000, max_deg: int = 6, seed: int = 20261016) -> list[Member]:
    rng = random.Random(seed)
    fields = {2: field_make(2), 3: field_make(3)}
    moduli = {q: [m for d in (1, 2, 3) for m in monic_polys(F, d)] for q, F in fields.items()}
    out = []
    while len(out) < n:
        q = rng.choice((2, 3))
        F = fields[q]
        picks = [rng.choice(moduli[q]) for _ in range(rng.randint(1, 6))]
        cong = tuple(Congruence(F.poly([rng.randrange(q) for _ in range(m.degree)]), m) for m in picks)
        inst = CoveringInstance(F, cong)
        if lcm_modulus(inst).degree > max_deg:
            continue
        s = max(picks.count(m) for m in picks)
        out.append(Member(inst, s, 1))
    return out


SCHEDULES = {
    "uniform 1/2": DeltaSchedule.uniform(),
    "by degree 17/100, 1/4": DeltaSchedule.default_by_degree(),
}


@dataclass
class SweepTally:
    runs: int = 0
    instances: int = 0
    certified: int = 0
    unsound: list = field(default_factory=list)
    mass_violations: int = 0
    fiber_violations: int = 0
    rhs_violations: list = field(default_factory=list)
    witness_violations: int = 0
    steps: int = 0
    seconds: float = 0.0


@lru_cache(maxsize=None)
def _rhs(norms: tuple, deltas: tuple, s: int, norm_pj: int) -> Fraction:
    return lemma31_rhs(norms, deltas, s, norm_pj).value


def _fibers_constant(state, classes) -> bool:
    seen = {}
    for a, c in zip(state.num, classes.tolist()):
        if seen.setdefault(c, a) != a:
            return False
    return True


def sweep(members: list[Member]) -> SweepTally:
    """Run every member under every schedule and count invariant failures."""
    tally = SweepTally()
    start = time.perf_counter()
    for mem in members:
        inst = mem.instance
        tally.instances += mem.size
        for schedule in SCHEDULES.values():
            res = distortion_verdict(inst, schedule, keep_states=True)
            tally.runs += 1
            chain = res.chain
            for j, state in enumerate(res.states):
                if sum(state.num) != state.den:
                    tally.mass_violations += 1
                if j and not _fibers_constant(state, projection_classes(chain, j)):
                    tally.fiber_violations += 1
            norms = tuple(chain.norm(i) for i in range(1, chain.J + 1))
            for step in res.moments.steps:
                tally.steps += 1
                j = step.j
                bound = _rhs(norms[:j - 1], tuple(res.deltas[:j - 1]), mem.s, norms[j - 1])
                if step.M2 > bound:
                    tally.rhs_violations.append((str(inst.congruences), j, step.M2, bound))
            if res.certified_noncover:
                tally.certified += 1
                if check_cover_exhaustive(inst).covers:
                    tally.unsound.append(inst)
                if res.uncovered_mass <= 0 or any(c.contains(res.witness) for c in inst.congruences):
                    tally.witness_violations += 1
    tally.seconds = time.perf_counter() - start
    return tally
