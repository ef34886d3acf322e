"""Exact integer linear algebra for finitely generated abelian groups.

Everything runs on Python's arbitrary-precision integers; intermediate
entry growth during Smith reduction is therefore harmless.  Groups are
kept in invariant-factor normal form, so isomorphism is plain equality.
All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod


class DimensionMismatch(ValueError):
    """Raised when matrix/group shapes are incompatible."""


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, immutable."""

    rows: int
    cols: int
    entries: tuple  # tuple of row tuples

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimensions")
        if len(self.entries) != self.rows:
            raise ValueError("row count mismatch")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("column count mismatch")

    @staticmethod
    def from_rows(rows_data) -> "IntMatrix":
        rows_data = [tuple(int(x) for x in row) for row in rows_data]
        ncols = len(rows_data[0]) if rows_data else 0
        return IntMatrix(len(rows_data), ncols, tuple(rows_data))

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self.column(j) for j in range(self.cols)))

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.rows}x{self.cols} * {other.rows}x{other.cols}")
        ot = other.transpose().entries
        data = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in ot)
            for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, data)

    def mul_vector(self, vec) -> tuple:
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.entries)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("row mismatch in hstack")
        data = tuple(self.entries[i] + other.entries[i] for i in range(self.rows))
        return IntMatrix(self.rows, self.cols + other.cols, data)

    def is_diagonal(self) -> bool:
        return all(self.entries[i][j] == 0
                   for i in range(self.rows) for j in range(self.cols) if i != j)

    def to_json_dict(self) -> dict:
        # decimal strings: JSON consumers need not support bignums
        return {"rows": self.rows, "cols": self.cols,
                "entries": [[str(x) for x in row] for row in self.entries]}

    @staticmethod
    def from_json_dict(d: dict) -> "IntMatrix":
        m = IntMatrix.from_rows([[int(x) for x in row] for row in d["entries"]])
        if m.rows != d["rows"] or m.cols != d["cols"]:
            raise ValueError("inconsistent matrix dimensions in JSON")
        return m


def _det_unimodular(m: IntMatrix) -> int:
    """Determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = m.rows
    if n != m.cols:
        raise DimensionMismatch("determinant of non-square matrix")
    if n == 0:
        return 1
    a = [list(row) for row in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


def _snf_inplace(a, u=None, uinv=None, v=None, vinv=None):
    """Reduce list-of-lists `a` to Smith form, updating transforms in place.

    u, v accumulate row/column operations so that u*a_orig*v = a_final;
    uinv, vinv accumulate the inverse transforms.  Any transform passed as
    None is simply not tracked (large relation matrices only need some of
    them).  Pivoting is on the least nonzero absolute value,
    Kannan--Bachem style.
    """
    nr = len(a)
    nc = len(a[0]) if nr else 0

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        if u is not None:
            u[i] = [x - q * y for x, y in zip(u[i], u[j])]
        if uinv is not None:  # inverse: col_j += q * col_i
            for r in range(len(uinv)):
                uinv[r][j] += q * uinv[r][i]

    def col_op(j, i, q):  # col_j -= q * col_i
        for r in range(nr):
            a[r][j] -= q * a[r][i]
        if v is not None:
            for r in range(len(v)):
                v[r][j] -= q * v[r][i]
        if vinv is not None:
            vinv[i] = [x + q * y for x, y in zip(vinv[i], vinv[j])]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if u is not None:
            u[i], u[j] = u[j], u[i]
        if uinv is not None:
            for r in range(len(uinv)):
                uinv[r][i], uinv[r][j] = uinv[r][j], uinv[r][i]

    def swap_cols(i, j):
        for r in range(nr):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        if v is not None:
            for r in range(len(v)):
                v[r][i], v[r][j] = v[r][j], v[r][i]
        if vinv is not None:
            vinv[i], vinv[j] = vinv[j], vinv[i]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        if u is not None:
            u[i] = [-x for x in u[i]]
        if uinv is not None:
            for r in range(len(uinv)):
                uinv[r][i] = -uinv[r][i]

    t = 0
    while t < min(nr, nc):
        # pivot: least |a_ij| != 0 in the trailing submatrix
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x != 0 and (piv is None or abs(x) < piv[0]):
                    piv = (abs(x), i, j)
        if piv is None:
            break
        _, pi, pj = piv
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_op(i, t, q)
                    if a[i][t]:  # remainder becomes the smaller pivot
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty and all(a[i][t] == 0 for i in range(t + 1, nr)) \
                    and all(a[t][j] == 0 for j in range(t + 1, nc)):
                break
        d = a[t][t]
        offender = None
        for i in range(t + 1, nr):
            if any(x % d for x in a[i][t + 1:]):
                offender = i
                break
        if offender is not None:
            row_op(t, offender, -1)  # pull the bad row up, redo this pivot
            continue
        if d < 0:
            negate_row(t)
        t += 1


def _identity_rows(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _snf_diag_u(m: IntMatrix):
    """Return (U, D, Uinv); column transforms are not tracked."""
    a = [list(row) for row in m.entries]
    u = _identity_rows(m.rows)
    uinv = _identity_rows(m.rows)
    _snf_inplace(a, u=u, uinv=uinv)
    return IntMatrix.from_rows(u), IntMatrix.from_rows(a), IntMatrix.from_rows(uinv)


def _snf_diag_v(m: IntMatrix):
    """Return (D, V); row transforms are not tracked."""
    a = [list(row) for row in m.entries]
    v = _identity_rows(m.cols)
    _snf_inplace(a, v=v)
    return IntMatrix.from_rows(a), IntMatrix.from_rows(v)


def smith_normal_form(m: IntMatrix):
    """Smith normal form of an integer matrix.

    Returns (U, D, V) with U*M*V = D, U and V unimodular, D diagonal with
    non-negative entries satisfying d1 | d2 | ... along the diagonal.
    """
    a = [list(row) for row in m.entries]
    u = _identity_rows(m.rows)
    v = _identity_rows(m.cols)
    _snf_inplace(a, u=u, v=v)
    return IntMatrix.from_rows(u), IntMatrix.from_rows(a), IntMatrix.from_rows(v)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FgAbelianGroup:
    """Finitely generated abelian group in invariant-factor form.

    Canonical generators: first `free_rank` infinite-order generators, then
    one generator of order d for each torsion entry d (d_i | d_{i+1}).
    """

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion entries must be >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("invariant factors must form a divisibility chain")

    @staticmethod
    def from_cyclic_factors(orders) -> "FgAbelianGroup":
        """Canonicalize a direct sum of cyclic groups (0 = infinite factor)."""
        orders = [abs(int(d)) for d in orders]
        free = sum(1 for d in orders if d == 0)
        fins = [d for d in orders if d > 1]
        if not fins:
            return FgAbelianGroup(free, ())
        rel = IntMatrix.from_rows([[fins[i] if i == j else 0 for j in range(len(fins))]
                                   for i in range(len(fins))])
        g = from_relations(rel)
        return FgAbelianGroup(free + g.free_rank, g.torsion)

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    def generator_orders(self) -> tuple:
        """Per-generator order, 0 marking infinite."""
        return (0,) * self.free_rank + self.torsion

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        return prod(self.torsion) if self.torsion else 1

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def direct_sum(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        return FgAbelianGroup.from_cyclic_factors(
            self.generator_orders() + other.generator_orders())

    def elements(self):
        """Iterate all elements of a finite group as coordinate tuples."""
        if self.free_rank:
            raise ValueError("cannot enumerate an infinite group")
        def rec(i):
            if i == len(self.torsion):
                yield ()
                return
            for rest in rec(i + 1):
                for x in range(self.torsion[i]):
                    yield (x,) + rest
        return rec(0)

    def reduce_coords(self, vec) -> tuple:
        """Normalize coordinates modulo the generator orders."""
        if len(vec) != self.ngens:
            raise DimensionMismatch("coordinate length mismatch")
        out = []
        for x, d in zip(vec, self.generator_orders()):
            out.append(x if d == 0 else x % d)
        return tuple(out)

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @staticmethod
    def from_json_dict(d: dict) -> "FgAbelianGroup":
        return FgAbelianGroup(int(d["free_rank"]), tuple(int(x) for x in d["torsion"]))


ZERO_GROUP = FgAbelianGroup(0, ())
Z = FgAbelianGroup(1, ())


# ---------------------------------------------------------------------------
# presentations: Z^n modulo integer relation columns


@dataclass(frozen=True)
class QuotientPresentation:
    """Quotient of Z^n by the column lattice of a relation matrix.

    Carries the canonical group together with the change of coordinates:
    `project` maps Z^n coordinates onto canonical generator coordinates,
    `lift` sends a canonical generator back to a representative in Z^n.
    """

    ngens: int
    group: FgAbelianGroup
    project_matrix: IntMatrix   # group.ngens x ngens
    lift_matrix: IntMatrix      # ngens x group.ngens

    def project(self, vec) -> tuple:
        return self.group.reduce_coords(self.project_matrix.mul_vector(vec))

    def lift(self, k: int) -> tuple:
        return self.lift_matrix.column(k)


def present_quotient(rel: IntMatrix) -> QuotientPresentation:
    n = rel.rows
    u, d, uinv = _snf_diag_u(rel)
    diag = [d[i, i] for i in range(min(d.rows, d.cols))]
    nnz = sum(1 for x in diag if x != 0)
    free_idx = list(range(nnz, n))
    tors_idx = [i for i in range(nnz) if diag[i] >= 2]
    kept = free_idx + tors_idx
    orders = [0] * len(free_idx) + [diag[i] for i in tors_idx]
    group = FgAbelianGroup(len(free_idx), tuple(diag[i] for i in tors_idx))
    proj_rows = []
    for i, o in zip(kept, orders):
        row = u.entries[i]
        proj_rows.append(tuple(x % o for x in row) if o else row)
    project = IntMatrix(len(kept), n, tuple(proj_rows))
    lift = IntMatrix(n, len(kept),
                     tuple(tuple(uinv[r, i] for i in kept) for r in range(n)))
    return QuotientPresentation(n, group, project, lift)


def from_relations(rel: IntMatrix) -> FgAbelianGroup:
    """Group on `rel.rows` generators modulo the relation columns of `rel`."""
    return present_quotient(rel).group


def integer_kernel_basis(m: IntMatrix):
    """Basis (list of length-`cols` tuples) of the kernel lattice of M."""
    d, v = _snf_diag_v(m)
    ker_cols = []
    for j in range(m.cols):
        if j >= min(m.rows, m.cols) or d[j, j] == 0:
            ker_cols.append(v.column(j))
    return ker_cols


def solve_integer(m: IntMatrix, b):
    """One integer solution x of M x = b, or None if unsolvable."""
    u, d, v = smith_normal_form(m)
    bp = u.mul_vector(b)
    y = [0] * m.cols
    for i in range(m.rows):
        di = d[i, i] if i < min(m.rows, m.cols) else 0
        if di == 0:
            if bp[i] != 0:
                return None
        else:
            if bp[i] % di:
                return None
            y[i] = bp[i] // di
    return v.mul_vector(y)


# ---------------------------------------------------------------------------
# maps


def _relation_columns(group: FgAbelianGroup) -> IntMatrix:
    """Defining relation lattice of the canonical presentation (d_i * e_i)."""
    n = group.ngens
    orders = group.generator_orders()
    cols = [i for i in range(n) if orders[i]]
    data = tuple(tuple(orders[j] if i == j else 0 for j in cols) for i in range(n))
    return IntMatrix(n, len(cols), data)


@dataclass(frozen=True)
class AbMap:
    """Homomorphism between canonical-form groups.

    `matrix` column j holds the image of domain generator j in the
    codomain's canonical coordinates.  Construction verifies that torsion
    is respected: d_j * (column j) must vanish in the codomain.
    """

    domain: FgAbelianGroup
    codomain: FgAbelianGroup
    matrix: IntMatrix
    _unchecked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if self.matrix.rows != self.codomain.ngens or self.matrix.cols != self.domain.ngens:
            raise DimensionMismatch(
                f"map matrix must be {self.codomain.ngens}x{self.domain.ngens}, "
                f"got {self.matrix.rows}x{self.matrix.cols}")
        # normalize entries modulo codomain orders
        cod_orders = self.codomain.generator_orders()
        norm = tuple(
            tuple(x % o for x in row) if (o := cod_orders[i]) else row
            for i, row in enumerate(self.matrix.entries)
        )
        object.__setattr__(self, "matrix", IntMatrix(self.matrix.rows, self.matrix.cols, norm))
        if not self._unchecked:
            dom_orders = self.domain.generator_orders()
            for j, dj in enumerate(dom_orders):
                if dj == 0:
                    continue
                for i, oi in enumerate(cod_orders):
                    x = dj * self.matrix[i, j]
                    if (x != 0) if oi == 0 else (x % oi != 0):
                        raise ValueError(
                            f"column {j} does not respect torsion (order {dj})")

    @staticmethod
    def identity(group: FgAbelianGroup) -> "AbMap":
        return AbMap(group, group, IntMatrix.identity(group.ngens))

    @staticmethod
    def zero(domain: FgAbelianGroup, codomain: FgAbelianGroup) -> "AbMap":
        return AbMap(domain, codomain, IntMatrix.zeros(codomain.ngens, domain.ngens))

    def apply(self, vec) -> tuple:
        return self.codomain.reduce_coords(self.matrix.mul_vector(self.domain.reduce_coords(vec)))

    def compose(self, first: "AbMap") -> "AbMap":
        """self o first (apply `first`, then `self`)."""
        if first.codomain != self.domain:
            raise DimensionMismatch("composition domain mismatch")
        return AbMap(first.domain, self.codomain, self.matrix.mul(first.matrix))

    def is_identity(self) -> bool:
        return self.domain == self.codomain and self == AbMap.identity(self.domain)


def map_kernel_cokernel(f: AbMap):
    """Kernel, cokernel and the quotient projection of a homomorphism.

    The cokernel is codomain/image with `projection` the canonical quotient
    map; the kernel is computed on integer lifts respecting the torsion
    relations of both sides.
    """
    n, m = f.domain.ngens, f.codomain.ngens
    rel_cod = _relation_columns(f.codomain)
    rel_dom = _relation_columns(f.domain)

    coker_pres = present_quotient(f.matrix.hstack(rel_cod))
    cokernel = coker_pres.group
    projection = AbMap(f.codomain, cokernel,
                       IntMatrix(cokernel.ngens, m, coker_pres.project_matrix.entries))

    # kernel lattice K = { x in Z^n : f(x) lies in the codomain relation lattice }
    big = f.matrix.hstack(rel_cod)
    k_gens = [k[:n] for k in integer_kernel_basis(big)]
    k_gens.extend(rel_dom.column(j) for j in range(rel_dom.cols))
    if k_gens:
        kmat = IntMatrix(n, len(k_gens), tuple(tuple(g[i] for g in k_gens) for i in range(n)))
        # relations among the kernel generators: combinations landing in rel_dom
        rel_vecs = [w[:len(k_gens)] for w in integer_kernel_basis(kmat.hstack(rel_dom))]
        relmat = IntMatrix(len(k_gens), len(rel_vecs),
                           tuple(tuple(w[i] for w in rel_vecs) for i in range(len(k_gens))))
        kernel = from_relations(relmat)
    else:
        kernel = ZERO_GROUP
    return kernel, cokernel, projection


def homology_at(outgoing: AbMap, incoming: AbMap) -> FgAbelianGroup:
    """ker(outgoing)/im(incoming) for maps C --incoming--> A --outgoing--> B.

    Requires outgoing o incoming = 0 (checked).
    """
    if incoming.codomain != outgoing.domain:
        raise DimensionMismatch("maps are not composable at a common group")
    if any(x != 0 for row in outgoing.compose(incoming).matrix.entries for x in row):
        raise ValueError("composite is not zero; not a chain complex")
    a = outgoing.domain
    n = a.ngens
    rel_a = _relation_columns(a)
    rel_b = _relation_columns(outgoing.codomain)
    k_gens = [k[:n] for k in integer_kernel_basis(outgoing.matrix.hstack(rel_b))]
    k_gens.extend(rel_a.column(j) for j in range(rel_a.cols))
    if not k_gens:
        return ZERO_GROUP
    kmat = IntMatrix(n, len(k_gens), tuple(tuple(g[i] for g in k_gens) for i in range(n)))
    # image lattice of `incoming` plus the relations of A
    img = incoming.matrix.hstack(rel_a)
    rel_vecs = [w[:len(k_gens)] for w in integer_kernel_basis(kmat.hstack(img))]
    relmat = IntMatrix(len(k_gens), len(rel_vecs),
                       tuple(tuple(w[i] for w in rel_vecs) for i in range(len(k_gens))))
    return from_relations(relmat)
