"""Nilpotent quotients, towers, and constructive normal generation.

The quotient G/gamma_{c+1}(G) of a finitely presented group is built by
induction on the class: starting from the abelianization, each step forms
the central cover of the current level (a fresh central tail generator on
every non-defining relation), harvests the linear relations among the
tails from the overlap consistency checks and from the evaluated group
relators, solves them by integer triangular elimination, and keeps the
surviving tails as the new generators of the next weight.

Indexing convention (normative): the class parameter c yields
G/gamma_{c+1}(G), so c = 1 is the abelianization.  All original
generators stay present as weight-1 pc generators for the whole tower
(possibly with relative order 1), which keeps every projection a plain
coordinate truncation and every base-generator image a unit vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .pcgroup import DEFAULT_OP_CAP, InconsistentPresentation, PcGroup, ResourceCapError
from .words import Word, parse_word, word_to_text


class NormalGenerationError(ValueError):
    """A level of the tower is not normally generated by the chosen set."""

    def __init__(self, level, message):
        self.level = level
        super().__init__(message)


@dataclass(frozen=True)
class FpPresentation:
    """Finite presentation: named generators plus relator words."""

    generators: tuple
    relators: tuple  # Words over the generator alphabet

    def __post_init__(self):
        names = tuple(self.generators)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        object.__setattr__(self, "generators", names)
        rels = []
        for r in self.relators:
            if isinstance(r, str):
                r = parse_word(r, names=names)
            if r.alphabet_size != len(names):
                r = Word(len(names), r.letters)
            rels.append(r)
        object.__setattr__(self, "relators", tuple(rels))

    @staticmethod
    def from_strings(generators, relator_texts) -> "FpPresentation":
        return FpPresentation(tuple(generators), tuple(relator_texts))

    def to_json_dict(self):
        return {"generators": list(self.generators),
                "relators": [word_to_text(r, self.generators) for r in self.relators]}

    @staticmethod
    def from_json_dict(d) -> "FpPresentation":
        return FpPresentation.from_strings(d["generators"], d["relators"])


# the presentation of the running example Z x| C2:  b^a = b^-1, a^2 = 1;
# the conjugation relation enters in commutator-free form a^-1*b*a*b
SEMIDIRECT_Z_C2 = FpPresentation.from_strings(("a", "b"), ("a^2", "a^-1*b*a*b"))


# ---------------------------------------------------------------------------
# integer triangular elimination (column Hermite form, leading-index pivots)


def _ext_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _triangular_basis(vectors, dim):
    """dict lead-index -> vector with positive pivot; a row Hermite basis.

    Each basis vector v encodes the relation sum(v[l] * t_l) = 0 with
    v[lead] > 0 and support only at indices >= lead.
    """
    basis = {}
    queue = [list(v) for v in vectors if any(v)]
    while queue:
        v = queue.pop()
        while True:
            lead = next((i for i, x in enumerate(v) if x), None)
            if lead is None:
                break
            b = basis.get(lead)
            if b is None:
                if v[lead] < 0:
                    v = [-x for x in v]
                basis[lead] = v
                break
            if v[lead] % b[lead] == 0:
                q = v[lead] // b[lead]
                v = [x - q * y for x, y in zip(v, b)]
                continue
            g, s, t = _ext_gcd(b[lead], v[lead])
            new = [s * x + t * y for x, y in zip(b, v)]
            if new[lead] < 0:
                new = [-x for x in new]
            qb = b[lead] // g
            qv = v[lead] // g
            basis[lead] = new
            queue.append([x - qb * y for x, y in zip(b, new)])
            v = [x - qv * y for x, y in zip(v, new)]
    # reduce entries sitting over later pivots; keeps vectors small & canonical
    for lead in sorted(basis, reverse=True):
        v = basis[lead]
        for l2 in sorted(basis):
            if l2 > lead:
                b2 = basis[l2]
                q = v[l2] // b2[l2]
                if q:
                    v = [x - q * y for x, y in zip(v, b2)]
        basis[lead] = v
    return basis


# ---------------------------------------------------------------------------
# levels


@dataclass(frozen=True)
class _LevelData:
    group: PcGroup
    definitions: frozenset  # relation keys ('pow', i) / ('conj', j, i) defining gens


def _abelianized_level(pres: FpPresentation, op_cap) -> _LevelData:
    g = len(pres.generators)
    basis = _triangular_basis([r.exponent_sums() for r in pres.relators], g)
    orders = tuple(basis[k][0 + k] if k in basis else 0 for k in range(g))
    power_tails = {}
    for k, v in basis.items():
        tail = [0] * g
        for l in range(k + 1, g):
            tail[l] = -v[l]
        if any(tail):
            power_tails[k] = tuple(tail)
    group = PcGroup((1,) * g, orders, power_tails, {}, nclass=1, op_cap=op_cap)
    return _LevelData(group, frozenset())


def _extend_level(level: _LevelData, pres: FpPresentation, target: int, op_cap) -> _LevelData:
    grp = level.group
    n, w, m = grp.n, grp.weights, grp.orders

    tail_keys = []
    for i in range(n):
        if m[i] and ("pow", i) not in level.definitions:
            tail_keys.append(("pow", i))
    for j in range(1, n):
        for i in range(j):
            if w[i] + w[j] <= target and ("conj", j, i) not in level.definitions:
                tail_keys.append(("conj", j, i))
    t_count = len(tail_keys)
    tidx = {key: n + t for t, key in enumerate(tail_keys)}

    cw = w + (target,) * t_count
    cm = m + (0,) * t_count
    cpt = {}
    for i in range(n):
        if not m[i]:
            continue
        vec = list(grp.power_tails.get(i, (0,) * n)) + [0] * t_count
        key = ("pow", i)
        if key in tidx:
            vec[tidx[key]] = 1
        if any(vec):
            cpt[i] = tuple(vec)
    cct = {}
    for j in range(1, n):
        for i in range(j):
            key = ("conj", j, i)
            base = grp.conj_tails.get((j, i))
            vec = (list(base) if base else [0] * n) + [0] * t_count
            if key in tidx:
                vec[tidx[key]] = 1
            if any(vec):
                cct[(j, i)] = tuple(vec)
    cover = PcGroup(cw, cm, cpt, cct, nclass=target, normalize=False, op_cap=op_cap)

    rel_vecs = []

    def push(diff):
        if any(diff[:n]):
            raise InconsistentPresentation(
                "cover defect escapes the central tail subgroup")
        tail = diff[n:]
        if any(tail):
            rel_vecs.append(tail)

    def diff_of(lhs, rhs):
        return cover.mult(cover.inverse(lhs), rhs)

    for i in range(n):
        for j in range(i + 1, n):
            if w[i] + w[j] > target:
                continue
            gj_gi = cover.mult(cover.unit(j), cover.unit(i))
            if m[j]:
                lhs = cover.mult(cover.power(cover.unit(j), m[j]), cover.unit(i))
                rhs = cover.mult(cover.power(cover.unit(j), m[j] - 1), gj_gi)
                push(diff_of(lhs, rhs))
            if m[i]:
                lhs = cover.mult(cover.unit(j), cover.power(cover.unit(i), m[i]))
                rhs = cover.mult(gj_gi, cover.power(cover.unit(i), m[i] - 1))
                push(diff_of(lhs, rhs))
            for k in range(j + 1, n):
                if w[i] + w[j] + w[k] > target:
                    continue
                lhs = cover.mult(cover.unit(k), cover.mult(cover.unit(j), cover.unit(i)))
                rhs = cover.mult(cover.mult(cover.unit(k), cover.unit(j)), cover.unit(i))
                push(diff_of(lhs, rhs))
    for i in range(n):
        if m[i]:
            lhs = cover.mult(cover.unit(i), cover.power(cover.unit(i), m[i]))
            rhs = cover.mult(cover.power(cover.unit(i), m[i]), cover.unit(i))
            push(diff_of(lhs, rhs))
    for r in pres.relators:
        push(cover.collect_word(r.letters))

    basis = _triangular_basis(rel_vecs, t_count)
    surviving = [t for t in range(t_count)
                 if not (t in basis and basis[t][t] == 1)]
    pos = {t: p for p, t in enumerate(surviving)}

    expr = {}
    for t in reversed(range(t_count)):
        b = basis.get(t)
        if b is not None and b[t] == 1:
            acc = [0] * len(surviving)
            for l in range(t + 1, t_count):
                if b[l]:
                    for p, val in enumerate(expr[l]):
                        acc[p] -= b[l] * val
            expr[t] = acc
        else:
            acc = [0] * len(surviving)
            acc[pos[t]] = 1
            expr[t] = acc

    n2 = n + len(surviving)

    def convert(vec):
        out = list(vec[:n]) + [0] * len(surviving)
        for t in range(t_count):
            c = vec[n + t]
            if c:
                for p, val in enumerate(expr[t]):
                    if val:
                        out[n + p] += c * val
        return tuple(out)

    fw = w + (target,) * len(surviving)
    fm = list(m) + [0] * len(surviving)
    fpt = {}
    for i, vec in cpt.items():
        conv = convert(vec)
        if any(conv):
            fpt[i] = conv
    fct = {}
    for key, vec in cct.items():
        conv = convert(vec)
        if any(conv):
            fct[key] = conv
    for t in surviving:
        b = basis.get(t)
        if b is None:
            continue
        fm[n + pos[t]] = b[t]
        rest = [0] * len(surviving)
        for l in range(t + 1, t_count):
            if b[l]:
                for p, val in enumerate(expr[l]):
                    rest[p] -= b[l] * val
        if any(rest):
            fpt[n + pos[t]] = tuple([0] * n + rest)

    group = PcGroup(fw, tuple(fm), fpt, fct, nclass=target, op_cap=op_cap)
    defs = set(level.definitions)
    for t in surviving:
        defs.add(tail_keys[t])
    return _LevelData(group, frozenset(defs))


# ---------------------------------------------------------------------------
# towers


@dataclass(frozen=True)
class TowerElement:
    """Compatible per-level normal forms (a truncated inverse-limit element)."""

    components: tuple  # components[c-1] = exponent vector at class-c level

    def level(self, c):
        return self.components[c - 1]


class Tower:
    """Inverse system of nilpotent quotients G/gamma_{c+1}(G), c = 1..c_max.

    Generators persist across levels, so the projection from level c+1 to
    level c is truncation of exponent vectors, and the image of base
    generator k is the k-th unit vector at every level.
    """

    def __init__(self, base: FpPresentation, levels):
        self.base = base
        self.levels = tuple(levels)
        self.c_max = len(self.levels)

    def level(self, c) -> PcGroup:
        if not (1 <= c <= self.c_max):
            raise ValueError(f"level {c} out of range 1..{self.c_max}")
        return self.levels[c - 1]

    def project(self, vec, from_c, to_c):
        if to_c > from_c:
            raise ValueError("projection goes down the tower")
        return tuple(vec[: self.level(to_c).n])

    def base_image(self, gen, c):
        """Image of a base generator (by name or index) at a level."""
        idx = gen if isinstance(gen, int) else self.base.generators.index(gen)
        return self.level(c).unit(idx)

    def element_from_word(self, w) -> TowerElement:
        if isinstance(w, str):
            w = parse_word(w, names=self.base.generators)
        comps = tuple(self.level(c).collect_word(w.letters)
                      for c in range(1, self.c_max + 1))
        return TowerElement(comps)

    def element(self, components) -> TowerElement:
        comps = tuple(tuple(v) for v in components)
        if len(comps) != self.c_max:
            raise ValueError("one component per level required")
        for c in range(1, self.c_max + 1):
            if len(comps[c - 1]) != self.level(c).n:
                raise ValueError(f"component {c} has wrong length")
            if c > 1 and self.project(comps[c - 1], c, c - 1) != comps[c - 2]:
                raise ValueError(f"components incompatible between levels {c-1} and {c}")
        return TowerElement(comps)

    def element_from_top(self, vec) -> TowerElement:
        """Tower element determined by a top-level normal form."""
        return TowerElement(tuple(tuple(vec[: self.level(c).n])
                                  for c in range(1, self.c_max + 1)))

    def graded_ranks(self, c):
        grp = self.level(c)
        return [len(grp.gens_of_weight(k)) for k in range(1, c + 1)]

    def to_json_dict(self):
        return {"base": self.base.to_json_dict(),
                "c_max": self.c_max,
                "levels": [g.to_json_dict() for g in self.levels]}


def build_tower(pres: FpPresentation, c_max: int, op_cap=DEFAULT_OP_CAP,
                check=True) -> Tower:
    """Levels 1..c_max with consistency verified at every stage."""
    if c_max < 1:
        raise ValueError("c_max must be >= 1")
    level = _abelianized_level(pres, op_cap)
    datas = [level]
    for target in range(2, c_max + 1):
        level = _extend_level(level, pres, target, op_cap)
        datas.append(level)
    levels = [d.group for d in datas]
    if check:
        for grp in levels:
            grp.check_consistency()
        for grp in levels:
            for r in pres.relators:
                if not grp.is_identity(grp.collect_word(r.letters)):
                    raise InconsistentPresentation(
                        f"relator {r.letters} survives at class {grp.nclass}")
    return Tower(pres, levels)


def nilpotent_quotient(pres: FpPresentation, c: int, op_cap=DEFAULT_OP_CAP) -> PcGroup:
    """Consistent pc presentation of G/gamma_{c+1}(G)."""
    return build_tower(pres, c, op_cap=op_cap).level(c)


# ---------------------------------------------------------------------------
# normal closure / normal generation


def _normal_closure_full(grp: PcGroup, seed_vectors):
    """True iff the normal closure of the seeds is the whole group.

    Induced generating sequence by sifting, closed under conjugation by
    all generators, gcd replacement at each depth, and power overflow into
    deeper coordinates.
    """
    n = grp.n
    igs = [None] * n
    queue = [tuple(v) for v in seed_vectors]

    def depth(vec):
        return next((i for i, x in enumerate(vec) if x), None)

    def on_insert(vec, d):
        lead = vec[d]
        md = grp.orders[d]
        if md:
            g = gcd(lead, md)
            if g < lead:
                # vec^s has leading coefficient gcd(lead, md); it will come
                # back through the queue and replace this entry
                _, s, _ = _ext_gcd(lead, md)
                queue.append(grp.power(vec, s))
            # power overflow: the part of <vec> lying in deeper coordinates
            queue.append(grp.power(vec, md // g))
        for h in range(n):
            for sign in (1, -1):
                queue.append(grp.conjugate(vec, grp.unit(h, sign)))
                queue.append(grp.commutator(vec, grp.unit(h, sign)))

    while queue:
        v = queue.pop()
        while True:
            d = depth(v)
            if d is None:
                break
            lead = v[d]
            md = grp.orders[d]
            if md == 0 and lead < 0:
                v = grp.inverse(v)
                lead = v[d]
            cur = igs[d]
            if cur is None:
                igs[d] = v
                on_insert(v, d)
                break
            e = cur[d]
            if lead % e == 0:
                v = grp.mult(grp.power(cur, -(lead // e)), v)
                continue
            g, s, t = _ext_gcd(e, lead)
            new = grp.mult(grp.power(cur, s), grp.power(v, t))
            # leading coordinates add, so the combination leads with the gcd
            assert depth(new) == d and new[d] == g
            igs[d] = new
            on_insert(new, d)
            queue.append(cur)
            v = grp.mult(grp.power(new, -(lead // g)), v)

    def member(vec):
        v = tuple(vec)
        while True:
            d = depth(v)
            if d is None:
                return True
            cur = igs[d]
            if cur is None or v[d] % cur[d]:
                return False
            v = grp.mult(grp.power(cur, -(v[d] // cur[d])), v)

    return all(member(grp.unit(i)) for i in range(n))


def normal_generation_check(tower: Tower, x_gens):
    """Per-level report: does the normal closure of X give the whole level?"""
    idxs = [g if isinstance(g, int) else tower.base.generators.index(g) for g in x_gens]
    report = []
    for c in range(1, tower.c_max + 1):
        grp = tower.level(c)
        seeds = [grp.unit(i) for i in idxs]
        report.append(_normal_closure_full(grp, seeds))
    return report


# ---------------------------------------------------------------------------
# the constructive decomposition (normally generated towers)


def lemma22_decompose(tower: Tower, a: TowerElement, x_gens):
    """Write a (trivial at level 1) as [g_1, x_1] ... [g_n, x_n] exactly.

    Works inside the top level: the weight-k defect of the current product
    against `a` is removed by corrections of weight k-1 obtained from an
    integer linear solve on the graded quotient; lower levels then hold by
    projection.  Solutions are chosen deterministically (particular
    solution of the Smith solve with free parameters zero).

    Raises NormalGenerationError naming the level where the hypothesis (or
    the solve) fails.
    """
    from .abelian import IntMatrix, solve_integer

    if not x_gens:
        raise NormalGenerationError(1, "empty conjugator set for a nontrivial group")
    idxs = [g if isinstance(g, int) else tower.base.generators.index(g) for g in x_gens]
    top = tower.level(tower.c_max)
    if len(a.components) != tower.c_max:
        raise ValueError("tower element does not match tower depth")
    if not tower.level(1).is_identity(a.level(1)):
        raise ValueError("element is not trivial at level 1")

    ngc = normal_generation_check(tower, x_gens)
    for c, ok in enumerate(ngc, start=1):
        if not ok:
            raise NormalGenerationError(
                c, f"level {c} is not normally generated by X")

    nx = len(idxs)
    x_units = [top.unit(i) for i in idxs]
    gs = [top.identity() for _ in range(nx)]
    target_vec = a.level(tower.c_max)

    for k in range(2, tower.c_max + 1):
        prod = top.identity()
        for gi, xi in zip(gs, x_units):
            prod = top.mult(prod, top.commutator(gi, xi))
        defect = top.mult(top.inverse(prod), target_vec)
        mw = top.min_weight(defect)
        if mw is None:
            continue
        if mw < k:
            raise InconsistentPresentation(
                f"defect of weight {mw} below current stage {k}")
        if mw > k:
            continue
        rows = top.gens_of_weight(k)
        prev = top.gens_of_weight(k - 1)
        cols = []
        col_meta = []
        for i in range(nx):
            for b in prev:
                com = top.commutator(top.unit(b), x_units[i])
                if top.min_weight(com) is not None and top.min_weight(com) < k:
                    raise InconsistentPresentation("graded commutator leaks weight")
                cols.append([com[r] for r in rows])
                col_meta.append((i, b))
        aug_meta = []
        for r_pos, r in enumerate(rows):
            if top.orders[r]:
                col = [0] * len(rows)
                col[r_pos] = top.orders[r]
                cols.append(col)
                aug_meta.append(r)
        rhs = [defect[r] for r in rows]
        mat = IntMatrix(len(rows), len(cols),
                        tuple(tuple(c[rp] for c in cols) for rp in range(len(rows))))
        sol = solve_integer(mat, rhs)
        if sol is None:
            raise NormalGenerationError(
                k, f"no solution at weight {k}: level is not normally generated by X")
        corrections = [[] for _ in range(nx)]
        for (i, b), val in zip(col_meta, sol[: len(col_meta)]):
            if val:
                corrections[i].append((b, val))
        for i in range(nx):
            if corrections[i]:
                u = top.collect_word(corrections[i])
                gs[i] = top.mult(gs[i], u)

    prod = top.identity()
    for gi, xi in zip(gs, x_units):
        prod = top.mult(prod, top.commutator(gi, xi))
    if prod != target_vec:
        raise InconsistentPresentation("reconstruction identity failed at top level")
    return [tower.element_from_top(g) for g in gs]
