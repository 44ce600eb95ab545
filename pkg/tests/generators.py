"""Deterministic random builders shared by the test suite.

Random additive categories are full subcategories of free-module categories
(objects Z^n, homs = matrices), which are associative and unital for free.
Random negative DG categories come from taking the negative part of bounded
complex categories over such additive bases; random twisted complexes are
built arrow by arrow, solving the closedness constraint at each span.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from dgtwist.dgcat import (
    AdditiveCategoryData,
    ComplexOver,
    DGCategory,
    HomElement,
    build_Bb,
    build_S,
    negative_part,
)
from dgtwist.intlin import IntMatrix, image_membership, kernel, solve_modulo
from dgtwist.twisted import TwistedComplex, TwistedMorphism, mc_residual, pretr_differential


def matrix_category(ranks: Sequence[int], prefix: str = "V") -> AdditiveCategoryData:
    """Additive category with objects Z^{ranks[i]} and matrix homs.

    Basis of hom(Z^a, Z^b) = elementary matrices E[r, s] (r < b rows,
    s < a cols), labeled "r,s"; composition is matrix multiplication.
    """
    names = tuple(f"{prefix}{i}" for i in range(len(ranks)))
    dims = {name: r for name, r in zip(names, ranks)}
    homs = {}
    for x in names:
        for y in names:
            n = dims[x] * dims[y]
            labels = tuple(f"{r},{s}" for r in range(dims[y]) for s in range(dims[x]))
            homs[(x, y)] = {0: labels} if labels else {}

    def unit_index(x, y, r, s):
        return r * dims[x] + s

    comp = {}
    for x in names:
        for y in names:
            for z in names:
                if not (dims[x] and dims[y] and dims[z]):
                    continue
                table = {}
                for s in range(dims[x]):
                    for m in range(dims[y]):
                        ui = unit_index(x, y, m, s)
                        for t in range(dims[z]):
                            vi = unit_index(y, z, t, m)
                            table[(vi, ui)] = {unit_index(x, z, t, s): 1}
                comp[(x, y, z, 0, 0)] = table

    identities = {}
    for x in names:
        n = dims[x] * dims[x]
        vec = [0] * n
        for r in range(dims[x]):
            vec[unit_index(x, x, r, r)] = 1
        identities[x] = tuple(vec)

    return AdditiveCategoryData(DGCategory(names, homs, {}, comp, identities))


def random_complexes(rng: random.Random, a: AdditiveCategoryData, count: int,
                     max_len: int = 3, deg_lo: int = -1, deg_hi: int = 2,
                     prefix: str = "X") -> list[ComplexOver]:
    """Random bounded complexes over a matrix category, d^2 = 0 by solving."""
    base = build_S(a)
    out = []
    for idx in range(count):
        n_terms = rng.randint(1, max_len)
        start = rng.randint(deg_lo, deg_hi - n_terms + 1)
        terms = {}
        for i in range(start, start + n_terms):
            terms[i] = rng.choice(a.objects)
        dmaps = {}
        prev: Optional[HomElement] = None
        for i in range(start, start + n_terms - 1):
            s, t = terms[i], terms[i + 1]
            n = base.rank(s, t, 0)
            attempt = None
            for _ in range(6):
                cand = base.element(s, t, 0, [rng.randint(-2, 2) for _ in range(n)])
                if prev is None or base.compose(cand, prev).is_zero():
                    attempt = cand
                    break
            if attempt is None:
                attempt = base.zero_hom(s, t, 0)
            dmaps[i] = attempt.coeffs
            prev = attempt
        out.append(ComplexOver(f"{prefix}{idx}", terms, dmaps))
    return out


def random_negative_category(rng: random.Random, n_objects: int = 2,
                             max_rank: int = 2, max_len: int = 3) -> DGCategory:
    """Negative part of a bounded-complex category over a small matrix base."""
    n_base = rng.randint(1, 2)
    ranks = [rng.randint(1, max_rank) for _ in range(n_base)]
    a = matrix_category(ranks)
    complexes = random_complexes(rng, a, n_objects, max_len=max_len)
    return negative_part(build_Bb(a, complexes))


def random_closed_element(rng: random.Random, c: DGCategory, x: str, y: str,
                          degree: int) -> Optional[HomElement]:
    """Random element of ker(delta) in the given graded piece."""
    n = c.rank(x, y, degree)
    if n == 0:
        return None
    d = c.diff(x, y, degree)
    rel = c.relation(x, y, degree + 1)
    if rel is None:
        ker = kernel(d)
    else:
        from dgtwist.intlin import preimage_lattice
        ker = preimage_lattice(d, rel)
    if ker.cols == 0:
        return None
    coeffs = [0] * n
    for j in range(ker.cols):
        k = rng.randint(-2, 2)
        if k:
            col = ker.col(j)
            coeffs = [a + k * b for a, b in zip(coeffs, col)]
    return c.element(x, y, degree, coeffs)


def random_twisted(rng: random.Random, c: DGCategory, n_terms: int = 3,
                   start: int = 0, allow_long_arrows: bool = True) -> TwistedComplex:
    """Random twisted complex over a negative base.

    Span-1 arrows are free (degree 0 is automatically closed over a negative
    base); longer arrows are solved from the closedness obstruction and
    dropped when no integral solution exists.
    """
    objs = list(c.objects)
    terms = {start + i: rng.choice(objs) for i in range(n_terms)}
    arrows: dict[tuple[int, int], HomElement] = {}
    for i in sorted(terms):
        j = i + 1
        if j in terms:
            n = c.rank(terms[i], terms[j], 0)
            if n and rng.random() < 0.85:
                coeffs = [rng.randint(-2, 2) for _ in range(n)]
                e = c.element(terms[i], terms[j], 0, coeffs)
                if not e.is_zero():
                    arrows[(i, j)] = e
    if allow_long_arrows:
        for span in range(2, n_terms):
            for i in sorted(terms):
                j = i + span
                if j not in terms:
                    continue
                x, y = terms[i], terms[j]
                deg = i - j + 1
                n = c.rank(x, y, deg)
                # obstruction: (-1)^j delta(q_ij) = - sum_l q_lj o q_il
                rhs = c.zero_hom(x, y, deg + 1)
                for l in range(i + 1, j):
                    if (i, l) in arrows and (l, j) in arrows:
                        rhs = rhs + c.compose(arrows[(l, j)], arrows[(i, l)])
                rhs = rhs.scale(-((-1) ** j))
                if n == 0:
                    if not c.is_zero_element(rhs):
                        # cannot satisfy closedness; drop a contributing arrow
                        for l in range(i + 1, j):
                            if (i, l) in arrows:
                                del arrows[(i, l)]
                                break
                    continue
                d = c.diff(x, y, deg)
                rel = c.relation(x, y, deg + 1)
                sol = solve_modulo(d, rhs.coeffs, rel)
                if sol is None:
                    for l in range(i + 1, j):
                        if (i, l) in arrows:
                            del arrows[(i, l)]
                            break
                    sol = tuple([0] * n) if c.is_zero_element(_obstruction(c, terms, arrows, i, j)) else None
                    if sol is None:
                        continue
                # randomize within the solution set
                ker = kernel(d)
                coeffs = list(sol)
                for jj in range(ker.cols):
                    k = rng.randint(-1, 1)
                    if k:
                        col = ker.col(jj)
                        coeffs = [a + k * b for a, b in zip(coeffs, col)]
                e = c.element(x, y, deg, coeffs)
                if not e.is_zero():
                    arrows[(i, j)] = e
    return TwistedComplex(c, terms, arrows)


def _obstruction(c: DGCategory, terms, arrows, i: int, j: int) -> HomElement:
    x, y = terms[i], terms[j]
    deg = i - j + 1
    rhs = c.zero_hom(x, y, deg + 1)
    for l in range(i + 1, j):
        if (i, l) in arrows and (l, j) in arrows:
            rhs = rhs + c.compose(arrows[(l, j)], arrows[(i, l)])
    return rhs


def random_closed_morphism(rng: random.Random, x: TwistedComplex,
                           y: TwistedComplex) -> Optional[TwistedMorphism]:
    """Random closed degree-0 twisted morphism x -> y, via the hom complex."""
    from dgtwist.twisted import hom_complex, morphism_from_vector
    cx, layout = hom_complex(x, y)
    if 0 not in layout.degrees():
        return None
    d0 = cx.diff(0)
    rel = cx.relation(1)
    if rel is None:
        ker = kernel(d0)
    else:
        from dgtwist.intlin import preimage_lattice
        ker = preimage_lattice(d0, rel)
    if ker.cols == 0:
        return None
    n = cx.rank(0)
    coeffs = [0] * n
    for j in range(ker.cols):
        k = rng.randint(-2, 2)
        if k:
            col = ker.col(j)
            coeffs = [a + k * b for a, b in zip(coeffs, col)]
    return morphism_from_vector(x, y, 0, coeffs, layout)
