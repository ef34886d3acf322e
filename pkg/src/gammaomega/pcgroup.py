"""Weighted polycyclic presentations and collection.

A PcGroup holds a consistent weighted nilpotent presentation: generators
listed by non-decreasing weight, relative orders (0 = infinite), power
tails g_i^{m_i} = u_i and commutator tails [g_j, g_i] = t_ji for j > i,
all tails being normal words in strictly later generators.  Elements are
exponent vectors in collected normal form.

Collection works block-from-the-left: multiplying a normal form by g^e
conjugates the trailing blocks through memoized conjugation maps and
resolves exponent overflow through the power tails.  Conjugation by an
inverse generator is not stored; it is recovered by a fixpoint iteration
that converges because the error gains weight at every step (the class is
finite).

The commutator convention everywhere is [a, b] = a^-1 b^-1 a b, so
g_j g_i = g_i g_j [g_j, g_i].
"""

from __future__ import annotations


class ResourceCapError(RuntimeError):
    """Collection exceeded its operation budget; result abandoned, not truncated."""


class InconsistentPresentation(ValueError):
    """A mandatory consistency check failed."""


DEFAULT_OP_CAP = 10_000_000


class PcGroup:
    """Consistent weighted nilpotent polycyclic presentation."""

    def __init__(self, weights, orders, power_tails, conj_tails, nclass,
                 normalize=True, op_cap=DEFAULT_OP_CAP):
        self.weights = tuple(weights)
        self.orders = tuple(orders)
        self.n = len(self.weights)
        self.nclass = nclass
        self.op_cap = op_cap
        self._budget = op_cap
        if len(self.orders) != self.n:
            raise ValueError("orders/weights length mismatch")
        for a, b in zip(self.weights, self.weights[1:]):
            if b < a:
                raise ValueError("weights must be non-decreasing")
        for o in self.orders:
            if o < 0:
                raise ValueError("negative relative order")
        self.power_tails = {}
        for i, vec in power_tails.items():
            vec = tuple(vec)
            if len(vec) != self.n or any(vec[: i + 1]):
                raise ValueError(f"power tail of generator {i} must live above it")
            if any(vec):
                self.power_tails[i] = vec
        self.conj_tails = {}
        for (j, i), vec in conj_tails.items():
            if not (0 <= i < j < self.n):
                raise ValueError("conjugation tail indices out of order")
            vec = tuple(vec)
            if len(vec) != self.n or any(vec[: j + 1]):
                raise ValueError(f"conjugation tail [{j},{i}] must live above {j}")
            if any(vec):
                self.conj_tails[(j, i)] = vec
        self._conj_maps = {}
        if normalize:
            self._normalize_tails()

    # -- basic vectors ------------------------------------------------------

    def identity(self):
        return (0,) * self.n

    def unit(self, g, e=1):
        return self._mult_block(self.identity(), g, e) if e else self.identity()

    def is_identity(self, vec):
        return not any(vec)

    def gens_of_weight(self, w):
        return [i for i in range(self.n) if self.weights[i] == w]

    def order(self):
        """Group order, None when infinite."""
        total = 1
        for o in self.orders:
            if o == 0:
                return None
            total *= o
        return total

    def is_trivial(self):
        return self.order() == 1

    def min_weight(self, vec):
        """Weight of the deepest lower-central term containing the element."""
        for i in range(self.n):
            if vec[i]:
                return self.weights[i]
        return None

    # -- collection core ----------------------------------------------------

    def _tick(self):
        self._budget -= 1
        if self._budget < 0:
            raise ResourceCapError(
                f"collection exceeded {self.op_cap} elementary steps")

    def _reset_budget(self):
        self._budget = self.op_cap

    def _mult_block(self, vec, g, e):
        """Normal form of vec * g^e."""
        if e == 0:
            return vec
        self._tick()
        n = self.n
        m = self.orders[g]
        combined = vec[g] + e
        if m:
            q, r = divmod(combined, m)
        else:
            q, r = 0, combined
        tail = None
        if q:
            pt = self.power_tails.get(g)
            if pt is not None:
                tail = self._power(pt, q)
        suffix = [(h, vec[h]) for h in range(g + 1, n) if vec[h]]
        if suffix:
            if tail is None:
                tail = self.identity()
            cmap = self._conj_map(g, e)
            for h, f in suffix:
                hv = cmap.get(h)
                if hv is None:
                    tail = self._mult_block(tail, h, f)
                else:
                    tail = self._mult_vec(tail, self._power(hv, f))
        out = list(vec[:g]) + [r] + [0] * (n - g - 1)
        if tail is not None:
            for h in range(g + 1, n):
                out[h] = tail[h]
        return tuple(out)

    def _mult_vec(self, a, b):
        for h in range(self.n):
            if b[h]:
                a = self._mult_block(a, h, b[h])
        return a

    def _inverse(self, vec):
        out = self.identity()
        for h in range(self.n - 1, -1, -1):
            if vec[h]:
                out = self._mult_block(out, h, -vec[h])
        return out

    def _power(self, vec, k):
        if k == 0:
            return self.identity()
        base = vec if k > 0 else self._inverse(vec)
        k = abs(k)
        out = self.identity()
        while True:
            if k & 1:
                out = self._mult_vec(out, base)
            k >>= 1
            if not k:
                return out
            base = self._mult_vec(base, base)

    # -- conjugation maps ---------------------------------------------------

    def _conj_map(self, g, e):
        """Map h -> normal form of g^-e h g^e, for h > g with nontrivial action."""
        key = (g, e)
        cached = self._conj_maps.get(key)
        if cached is not None:
            return cached
        if e == 1:
            cmap = {}
            for (h, gg), tail in self.conj_tails.items():
                if gg == g:
                    vec = list(tail)
                    vec[h] = 1
                    cmap[h] = tuple(vec)
        elif e == -1:
            base = self._conj_map(g, 1)
            cmap = {}
            for h in base:
                cmap[h] = self._conj_inverse_fixpoint(h, g)
        else:
            half = e // 2 if e > 0 else -((-e) // 2)
            rest = e - half
            m1 = self._conj_map(g, half)
            cmap = {}
            touched = set(m1) | set(self._conj_map(g, rest))
            for h in touched:
                x = m1.get(h)
                if x is None:
                    x = self.identity()[:h] + (1,) + self.identity()[h + 1:]
                y = self._conj_vec(x, g, rest)
                hv = list(self.identity())
                hv[h] = 1
                if y != tuple(hv):
                    cmap[h] = y
        self._conj_maps[key] = cmap
        return cmap

    def _conj_vec(self, vec, g, e):
        """Normal form of g^-e * vec * g^e (vec supported above g)."""
        if e == 0 or self.is_identity(vec):
            return vec
        cmap = self._conj_map(g, e)
        out = self.identity()
        for h in range(g + 1, self.n):
            f = vec[h]
            if not f:
                continue
            hv = cmap.get(h)
            if hv is None:
                out = self._mult_block(out, h, f)
            else:
                out = self._mult_vec(out, self._power(hv, f))
        return out

    def _conj_inverse_fixpoint(self, h, g):
        """Solve x^g = g_h; the error gains weight every round."""
        target = list(self.identity())
        target[h] = 1
        target = tuple(target)
        x = target
        for _ in range(self.nclass + 2):
            y = self._conj_vec(x, g, 1)
            if y == target:
                return x
            err = self._mult_vec(self._inverse(y), target)
            x = self._mult_vec(x, err)
        raise InconsistentPresentation(
            f"inverse conjugation of generator {h} by {g} does not converge")

    # -- public element operations -----------------------------------------

    def mult(self, a, b):
        self._reset_budget()
        return self._mult_vec(a, b)

    def inverse(self, a):
        self._reset_budget()
        return self._inverse(a)

    def power(self, a, k):
        self._reset_budget()
        return self._power(a, k)

    def conjugate(self, a, by):
        """by^-1 * a * by."""
        self._reset_budget()
        return self._mult_vec(self._mult_vec(self._inverse(by), a), by)

    def commutator(self, a, b):
        """[a, b] = a^-1 b^-1 a b."""
        self._reset_budget()
        ab = self._mult_vec(a, b)
        return self._mult_vec(self._inverse(self._mult_vec(b, a)), ab)

    def collect_word(self, letters):
        """Normal form of a letter word ((gen, exp), ...)."""
        self._reset_budget()
        out = self.identity()
        for g, e in letters:
            out = self._mult_block(out, g, e)
        return out

    def element_order(self, vec, cap=None):
        """Order of an element of a finite group (cap guards runaways)."""
        self._reset_budget()
        limit = cap or self.order()
        if limit is None:
            raise ValueError("element_order needs a finite group or a cap")
        acc = vec
        k = 1
        while not self.is_identity(acc):
            acc = self._mult_vec(acc, vec)
            k += 1
            if k > limit:
                raise InconsistentPresentation("element order exceeds group order")
        return k

    # -- normalization and consistency --------------------------------------

    def _normalize_tails(self):
        """Re-collect stored tails bottom-up so every tail is a normal form.

        Tails of generator k only involve generators above k, whose own
        tails are already normalized when k is processed.
        """
        for k in range(self.n - 1, -1, -1):
            pt = self.power_tails.get(k)
            if pt is not None:
                nf = self.collect_word([(h, pt[h]) for h in range(k + 1, self.n) if pt[h]])
                if any(nf):
                    self.power_tails[k] = nf
                else:
                    del self.power_tails[k]
            for i in range(k):
                ct = self.conj_tails.get((k, i))
                if ct is not None:
                    nf = self.collect_word([(h, ct[h]) for h in range(k + 1, self.n) if ct[h]])
                    if any(nf):
                        self.conj_tails[(k, i)] = nf
                    else:
                        del self.conj_tails[(k, i)]
            self._conj_maps.clear()
        self._conj_maps.clear()

    def consistency_failures(self, limit=None):
        """Collect failing overlap checks.

        Associativity triples and commutator/power overlaps are checked up
        to the weight bound: an overlap whose generator weights sum beyond
        the class lands in a vanishing lower-central term, so only the
        bounded ones can fail.
        """
        fails = []
        n, w, m = self.n, self.weights, self.orders

        def record(kind, idx, lhs, rhs):
            if lhs != rhs:
                fails.append((kind, idx, lhs, rhs))
            return limit is not None and len(fails) >= limit

        for i in range(n):
            for j in range(i + 1, n):
                if w[i] + w[j] > self.nclass:
                    continue
                self._reset_budget()
                gj_gi = self._mult_block(self.unit(j), i, 1)
                if m[j]:
                    lhs = self._mult_block(self._power(self.unit(j), m[j]), i, 1)
                    rhs = self._mult_vec(self._power(self.unit(j), m[j] - 1), gj_gi)
                    if record("power-left", (j, i), lhs, rhs):
                        return fails
                if m[i]:
                    lhs = self._mult_vec(self.unit(j), self._power(self.unit(i), m[i]))
                    rhs = self._mult_vec(gj_gi, self._power(self.unit(i), m[i] - 1))
                    if record("power-right", (j, i), lhs, rhs):
                        return fails
                else:
                    back = self._mult_block(gj_gi, i, -1)
                    if record("inverse-cancel", (j, i), back, self.unit(j)):
                        return fails
                    fwd = self._mult_block(self._mult_block(self.unit(j), i, -1), i, 1)
                    if record("inverse-cancel2", (j, i), fwd, self.unit(j)):
                        return fails
                for k in range(j + 1, n):
                    if w[i] + w[j] + w[k] > self.nclass:
                        continue
                    self._reset_budget()
                    lhs = self._mult_vec(self.unit(k), self._mult_block(self.unit(j), i, 1))
                    rhs = self._mult_block(self._mult_block(self.unit(k), j, 1), i, 1)
                    if record("assoc", (k, j, i), lhs, rhs):
                        return fails
        for i in range(n):
            if m[i]:
                self._reset_budget()
                lhs = self._mult_vec(self.unit(i), self._power(self.unit(i), m[i]))
                rhs = self._mult_block(self._power(self.unit(i), m[i]), i, 1)
                if record("power-self", (i,), lhs, rhs):
                    return fails
        return fails

    def check_consistency(self):
        fails = self.consistency_failures(limit=1)
        if fails:
            kind, idx, lhs, rhs = fails[0]
            raise InconsistentPresentation(
                f"overlap {kind} at {idx}: {lhs} != {rhs}")

    # -- serialization -------------------------------------------------------

    def to_json_dict(self):
        def vec_word(vec):
            return [[h, vec[h]] for h in range(self.n) if vec[h]]
        return {
            "class": self.nclass,
            "quotient": f"G/gamma_{self.nclass + 1}(G)",
            "ngens": self.n,
            "weights": list(self.weights),
            "relative_orders": list(self.orders),
            "power_relations": {str(i): vec_word(v) for i, v in sorted(self.power_tails.items())},
            "commutator_relations": {f"{j},{i}": vec_word(v)
                                     for (j, i), v in sorted(self.conj_tails.items())},
            "order": self.order(),
        }
