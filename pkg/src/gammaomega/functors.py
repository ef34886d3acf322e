"""Quadratic and exterior functors on finitely generated abelian groups.

The quadratic functor is computed structurally from its behaviour on
cyclic groups and direct sums; a brute-force presentation built from the
defining relations gamma(-x) = gamma(x) and the three-variable cocycle
relation serves as an independent oracle on small finite groups.  Induced
maps are expressed on the fixed basis "diagonal generators first, then
cross terms in lexicographic order"; that ordering is normative for all
matrix encodings emitted here.

Rational vector spaces are carried as dimensions only.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from math import comb, gcd

from .abelian import (
    AbMap,
    FgAbelianGroup,
    IntMatrix,
    QuotientPresentation,
    _det_unimodular,
    present_quotient,
)


@dataclass(frozen=True)
class FunctorName:
    """One of the supported functors: tensor2, ext:k, sym2, gamma2."""

    kind: str       # "tensor2" | "ext" | "sym2" | "gamma2"
    degree: int = 0  # exterior power degree, >= 1

    def __post_init__(self):
        if self.kind not in ("tensor2", "ext", "sym2", "gamma2"):
            raise ValueError(f"unknown functor kind {self.kind!r}")
        if self.kind == "ext" and self.degree < 1:
            raise ValueError("exterior degree must be >= 1")
        if self.kind != "ext" and self.degree:
            raise ValueError("degree only applies to exterior powers")

    def json_name(self) -> str:
        return f"ext:{self.degree}" if self.kind == "ext" else self.kind

    @staticmethod
    def parse(name: str) -> "FunctorName":
        if name.startswith("ext:"):
            return FunctorName("ext", int(name.split(":", 1)[1]))
        return FunctorName(name)


TENSOR_SQUARE = FunctorName("tensor2")
SYM2 = FunctorName("sym2")
GAMMA2 = FunctorName("gamma2")


def exterior(k: int) -> FunctorName:
    return FunctorName("ext", k)


@dataclass(frozen=True)
class RationalSpace:
    """A rational vector space, remembered only by its dimension."""

    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("negative dimension")

    def to_json_dict(self) -> dict:
        return {"q_dim": self.dim}


# ---------------------------------------------------------------------------
# structural values
#
# Building blocks, with d = 0 meaning an infinite cyclic factor:
#   C_d (x) C_e        has order gcd'(d, e)
#   Gamma2(C_d)        has order 2d for even d, d for odd d, 0 for d = 0
#   Sym2(C_d)          has order d
#   Lambda^k over a sum of cyclics is the sum over k-element subsets of the
#   tensor of the chosen factors (exterior powers of cyclics vanish in
#   degree >= 2).


def _tensor_order(d: int, e: int) -> int:
    if d == 0:
        return e
    if e == 0:
        return d
    return gcd(d, e)


def _gamma_diag_order(d: int) -> int:
    if d == 0:
        return 0
    return 2 * d if d % 2 == 0 else d


def _functor_basis(f: FunctorName, n: int):
    """Index tuples of the presentation basis, in the normative order."""
    if f.kind == "tensor2":
        return [(i, j) for i in range(n) for j in range(n)]
    if f.kind == "ext":
        return list(combinations(range(n), f.degree))
    # sym2 and gamma2: diagonal first, then lexicographic cross terms
    return [(i, i) for i in range(n)] + list(combinations(range(n), 2))


def _functor_orders(f: FunctorName, orders):
    """Relative order of each basis element (0 = infinite)."""
    out = []
    for idx in _functor_basis(f, len(orders)):
        if f.kind == "ext":
            o = 0
            for i in idx:
                o = _tensor_order(o, orders[i])
            out.append(o)
        elif f.kind == "tensor2":
            out.append(_tensor_order(orders[idx[0]], orders[idx[1]]))
        else:
            i, j = idx
            if i == j:
                out.append(_gamma_diag_order(orders[i]) if f.kind == "gamma2" else orders[i])
            else:
                out.append(_tensor_order(orders[i], orders[j]))
    return out


def _presentation(f: FunctorName, a: FgAbelianGroup) -> QuotientPresentation:
    orders = _functor_orders(f, a.generator_orders())
    n = len(orders)
    cols = [i for i in range(n) if orders[i]]
    rel = IntMatrix(n, len(cols),
                    tuple(tuple(orders[j] if i == j else 0 for j in cols) for i in range(n)))
    return present_quotient(rel)


def functor_apply(f: FunctorName, a: FgAbelianGroup) -> FgAbelianGroup:
    """Value of the functor on a group, in canonical form.

    Exterior powers beyond the minimal generator count come out zero,
    which is a result, not an error.
    """
    return _presentation(f, a).group


def _induced_presentation_matrix(f: FunctorName, m: IntMatrix, nd: int, nc: int):
    """Matrix of the induced map on presentation bases.

    `m` is the underlying map's matrix (nc x nd); rows/cols of the result
    are indexed by _functor_basis of the codomain/domain.
    """
    dom_basis = _functor_basis(f, nd)
    cod_basis = _functor_basis(f, nc)
    cod_index = {idx: r for r, idx in enumerate(cod_basis)}
    out = [[0] * len(dom_basis) for _ in cod_basis]

    for c, idx in enumerate(dom_basis):
        if f.kind == "tensor2":
            j, l = idx
            for i in range(nc):
                for k in range(nc):
                    val = m[i, j] * m[k, l]
                    if val:
                        out[cod_index[(i, k)]][c] += val
        elif f.kind == "ext":
            k = f.degree
            for tgt in combinations(range(nc), k):
                minor = IntMatrix.from_rows([[m[r, s] for s in idx] for r in tgt])
                val = _det_unimodular(minor)
                if val:
                    out[cod_index[tgt]][c] += val
        else:
            # gamma2 cross terms are the bilinear w(x, y) = gamma(x+y) -
            # gamma(x) - gamma(y) with w(b, b) = 2*gamma(b); sym2 cross terms
            # are plain products.  The factor of 2 therefore sits on opposite
            # sides of the diagonal/cross split for the two functors.
            j, l = idx
            if j == l:
                cross_factor = 1 if f.kind == "gamma2" else 2
                for i in range(nc):
                    v = m[i, j]
                    if v:
                        out[cod_index[(i, i)]][c] += v * v
                for i, k in combinations(range(nc), 2):
                    v = m[i, j] * m[k, j]
                    if v:
                        out[cod_index[(i, k)]][c] += cross_factor * v
            else:
                diag_factor = 2 if f.kind == "gamma2" else 1
                for i in range(nc):
                    v = m[i, j] * m[i, l]
                    if v:
                        out[cod_index[(i, i)]][c] += diag_factor * v
                for i, k in combinations(range(nc), 2):
                    v = m[i, j] * m[k, l] + m[k, j] * m[i, l]
                    if v:
                        out[cod_index[(i, k)]][c] += v
    return out


def functor_map(f: FunctorName, phi: AbMap) -> AbMap:
    """Induced map F(phi): F(domain) -> F(codomain)."""
    nd, nc = phi.domain.ngens, phi.codomain.ngens
    pres_d = _presentation(f, phi.domain)
    pres_c = _presentation(f, phi.codomain)
    p = _induced_presentation_matrix(f, phi.matrix, nd, nc)
    pm = IntMatrix.from_rows(p) if p else IntMatrix.zeros(0, 0)
    if not p:
        pm = IntMatrix.zeros(len(_functor_basis(f, nc)), len(_functor_basis(f, nd)))
    mat = pres_c.project_matrix.mul(pm).mul(pres_d.lift_matrix)
    return AbMap(pres_d.group, pres_c.group, mat)


# ---------------------------------------------------------------------------
# oracle


def gamma2_oracle(a: FgAbelianGroup, element_bound: int) -> FgAbelianGroup:
    """Present the quadratic functor directly from its defining relations.

    One generator gamma(x) per element x of a finite group, relations
    gamma(-x) = gamma(x) and the three-variable cocycle relation over all
    element triples.  Test-only path; guards against blowup via
    `element_bound`.
    """
    order = a.order()
    if order is None:
        raise ValueError("oracle requires a finite group")
    if order > element_bound:
        raise ValueError(f"group order {order} exceeds bound {element_bound}")

    elems = list(a.elements())
    index = {e: i for i, e in enumerate(elems)}
    tors = a.torsion

    def add(x, y):
        return tuple((u + v) % d for u, v, d in zip(x, y, tors))

    def neg(x):
        return tuple((-u) % d for u, d in zip(x, tors))

    cols = set()
    for x in elems:
        col = [0] * len(elems)
        col[index[neg(x)]] += 1
        col[index[x]] -= 1
        if any(col):
            cols.add(tuple(col))
    for x, y, z in combinations_with_replacement(elems, 3):
        col = [0] * len(elems)
        col[index[add(add(x, y), z)]] += 1
        col[index[add(x, y)]] -= 1
        col[index[add(y, z)]] -= 1
        col[index[add(x, z)]] -= 1
        col[index[x]] += 1
        col[index[y]] += 1
        col[index[z]] += 1
        if any(col):
            cols.add(tuple(col))

    cols = sorted(cols)
    rel = IntMatrix(len(elems), len(cols),
                    tuple(tuple(c[i] for c in cols) for i in range(len(elems))))
    return present_quotient(rel).group


# ---------------------------------------------------------------------------
# rational dimension counting


def rational_dim(f: FunctorName, v: RationalSpace) -> int:
    """Dimension of the functor's value on a rational vector space."""
    d = v.dim
    if f.kind == "tensor2":
        return d * d
    if f.kind == "ext":
        return comb(d, f.degree)
    # over Q the quadratic functor has the dimension of the symmetric square
    return d * (d + 1) // 2
