"""Category-O modules as per-weight action matrices, characters, and the
classical Lie algebra (co)homology complexes.

Module weights are stored relative to the highest weight: integer lattice
tuples w with ell(w) <= 0, the highest weight itself sitting at the zero
tuple.  The character of the inducing datum enters only through the scalars
lambda(label) on the degree-0 basis; everything else is PBW straightening.

The correctness oracle for every constructor is the representation property
(commutator of action matrices = action of the bracket), exposed as
check_commutators and exercised relentlessly by the test suite.
"""

from __future__ import annotations

from fractions import Fraction

from .liealg import WindowError, subalgebra, wt_add, wt_neg, wt_sub, wt_zero
from .linalg import SparseMatrix
from .pbw import (
    canonical_order,
    enumerate_pbw_weights,
    flatten,
    monomial_label,
    normal_order_word,
)

__all__ = [
    "WeightModule",
    "Character",
    "CohomologyTable",
    "verma",
    "coverma",
    "character",
    "product_formula_character",
    "ce_cohomology",
    "ce_homology",
    "trivial_module",
    "character_module",
    "free_negative_module",
    "direct_sum",
    "check_commutators",
]


class ModuleError(Exception):
    pass


class WeightModule:
    """A weight-graded module materialized to a fixed depth.

    ``weights`` maps each relative weight (ell in [-depth, 0]) to its list of
    basis labels; ``rule(eid, w)`` produces the action matrix M_w -> M_{w+wt}.
    Matrices are cached; every module weight with ell >= -depth is present,
    so a missing key means the weight space is zero.
    """

    def __init__(self, alg, name, weights, rule, depth, lam=None):
        self.alg = alg
        self.name = name
        self.depth = depth
        self.lam = dict(lam or {})
        self.weights = {tuple(w): list(basis) for w, basis in weights.items() if basis}
        self._rule = rule
        self._cache: dict = {}

    def dim(self, w) -> int:
        return len(self.weights.get(tuple(w), ()))

    def basis_labels(self, w) -> list:
        return self.weights.get(tuple(w), [])

    def weights_list(self) -> list:
        return sorted(self.weights)

    def ell(self, w) -> int:
        return self.alg.ell(w)

    def in_depth(self, w) -> bool:
        return -self.depth <= self.alg.ell(w) <= 0

    def action(self, eid: int, w) -> SparseMatrix:
        """Matrix of the basis element ``eid``: M_w -> M_{w + wt(eid)}."""
        w = tuple(w)
        key = (eid, w)
        m = self._cache.get(key)
        if m is None:
            target = wt_add(w, self.alg.weight(eid))
            if self.alg.ell(target) > 0 or self.dim(w) == 0:
                m = SparseMatrix(self.dim(target), self.dim(w))
            elif not self.in_depth(target) or not self.in_depth(w):
                raise WindowError(
                    f"{self.name}: action of {self.alg.label(eid)} at weight {w} "
                    f"needs weights outside depth {self.depth}"
                )
            else:
                m = self._rule(eid, w)
            self._cache[key] = m
        return m

    def apply(self, eid: int, w, vec):
        return self.action(eid, w).apply(vec)

    def lam_value(self, eid: int) -> Fraction:
        return Fraction(self.lam.get(self.alg.label(eid), 0))

    def __repr__(self):
        total = sum(len(b) for b in self.weights.values())
        return f"WeightModule({self.name}, depth={self.depth}, total dim={total})"


# -- constructors ---------------------------------------------------------------


def _lambda_scalar(alg, lam: dict, factors) -> Fraction:
    """Product of lambda over a PBW suffix; positive factors kill the term."""
    out = Fraction(1)
    for eid, exp in factors:
        if alg.degree(eid) > 0:
            return Fraction(0)
        v = Fraction(lam.get(alg.label(eid), 0))
        if not v:
            return Fraction(0)
        out *= v**exp
    return out


def _split_canonical(alg, mon):
    """Split a canonical-order monomial into (deg<0 prefix, deg>=0 suffix)."""
    for i, (eid, _) in enumerate(mon):
        if alg.degree(eid) >= 0:
            return mon[:i], mon[i:]
    return mon, ()


def verma(alg, lam: dict, depth: int) -> WeightModule:
    """Highest-weight module induced from the character ``lam`` of g_0.

    Basis: PBW monomials in the strictly negative part applied to the
    highest-weight vector; actions by straightening in the canonical order
    and evaluating the nonnegative suffix on the vector.
    """
    alg.ensure_window(-2 * depth - 4, 2 * depth + 4)
    neg = subalgebra(alg, "g_below_zero")
    order = canonical_order(alg)
    tab = enumerate_pbw_weights(neg, depth, order)
    weights = {w: [monomial_label(alg, m) for m in mons] for w, mons in tab.items()}
    index = {w: {m: i for i, m in enumerate(mons)} for w, mons in tab.items()}

    def rule(eid, w):
        target = wt_add(w, alg.weight(eid))
        rows = tab.get(target, [])
        cols = tab.get(tuple(w), [])
        mat = SparseMatrix(len(rows), len(cols))
        tindex = index.get(target, {})
        for c, mon in enumerate(cols):
            word = (eid,) + flatten(mon)
            for out_mon, coeff in normal_order_word(alg, word, order).items():
                negpart, rest = _split_canonical(alg, out_mon)
                scalar = _lambda_scalar(alg, lam, rest)
                if not scalar:
                    continue
                r = tindex.get(negpart)
                if r is None:
                    raise ModuleError(f"verma: monomial escaped basis at weight {target}")
                mat.add(r, c, coeff * scalar)
        return mat

    return WeightModule(alg, f"V({_lam_str(lam)})", weights, rule, depth, lam)


def coverma(alg, lam: dict, depth: int) -> WeightModule:
    """Contragredient Verma module realized on dual PBW monomials of U(g_+).

    The action is (z·phi)(p) = phi(p z) with p z straightened into the
    U(g_-) U(g_+) factorization and lambda applied to the left factor
    (strictly negative factors kill the term).
    """
    alg.ensure_window(-2 * depth - 4, 2 * depth + 4)
    pos = subalgebra(alg, "gplus")
    order = canonical_order(alg)
    ptab = enumerate_pbw_weights(pos, depth, order)
    tab = {wt_neg(w): mons for w, mons in ptab.items()}
    weights = {w: [monomial_label(alg, m) + "*" for m in mons] for w, mons in tab.items()}
    index = {w: {m: i for i, m in enumerate(mons)} for w, mons in tab.items()}

    def rule(eid, w):
        target = wt_add(w, alg.weight(eid))
        rows = tab.get(target, [])
        cols = tab.get(tuple(w), [])
        mat = SparseMatrix(len(rows), len(cols))
        cindex = index.get(tuple(w), {})
        for r, p in enumerate(rows):
            word = flatten(p) + (eid,)
            for out_mon, coeff in normal_order_word(alg, word, order).items():
                mpart, ppart = _split_strict_negative(alg, out_mon)
                scalar = _lambda_scalar_left(alg, lam, mpart)
                if not scalar:
                    continue
                c = cindex.get(ppart)
                if c is not None:
                    mat.add(r, c, coeff * scalar)
        return mat

    return WeightModule(alg, f"V*({_lam_str(lam)})", weights, rule, depth, lam)


def _split_strict_negative(alg, mon):
    """Split a canonical monomial into (deg<=0 prefix, deg>0 suffix)."""
    for i, (eid, _) in enumerate(mon):
        if alg.degree(eid) > 0:
            return mon[:i], mon[i:]
    return mon, ()


def _lambda_scalar_left(alg, lam: dict, factors) -> Fraction:
    out = Fraction(1)
    for eid, exp in factors:
        if alg.degree(eid) < 0:
            return Fraction(0)
        out *= Fraction(lam.get(alg.label(eid), 0)) ** exp
    return out


def _lam_str(lam: dict) -> str:
    if not lam:
        return "0"
    return ",".join(f"{k}={v}" for k, v in sorted(lam.items()))


def trivial_module(alg, depth: int = 0) -> WeightModule:
    """The one-dimensional trivial module."""
    zero = wt_zero(alg.rank)

    def rule(eid, w):
        return SparseMatrix(0, 0)

    m = WeightModule(alg, "C", {zero: ["1"]}, rule, depth)

    def rule2(eid, w):
        target = wt_add(w, alg.weight(eid))
        return SparseMatrix(m.dim(target), m.dim(w))

    m._rule = rule2
    return m


def character_module(alg, lam: dict, depth: int = 0) -> WeightModule:
    """One-dimensional module C_lambda over an algebra or subalgebra view.

    Degree-0 members act by lambda, everything else by zero; the caller is
    responsible for lambda vanishing on brackets (checked by the oracle).
    """
    zero = wt_zero(alg.rank)

    def rule(eid, w):
        target = wt_add(w, alg.weight(eid))
        mat = SparseMatrix(1 if target == zero else 0, 1 if tuple(w) == zero else 0)
        if target == zero and tuple(w) == zero:
            v = Fraction(lam.get(alg.label(eid), 0))
            if v:
                mat.add(0, 0, v)
        return mat

    return WeightModule(alg, f"C_({_lam_str(lam)})", {zero: ["1"]}, rule, depth, lam)


def free_negative_module(sub, depth: int) -> WeightModule:
    """U(sub) as a module over sub by left multiplication (sub strictly negative)."""
    order = canonical_order(sub)
    tab = enumerate_pbw_weights(sub, depth, order)
    weights = {w: [monomial_label(sub, m) for m in mons] for w, mons in tab.items()}
    index = {w: {m: i for i, m in enumerate(mons)} for w, mons in tab.items()}

    def rule(eid, w):
        target = wt_add(w, sub.weight(eid))
        rows = tab.get(target, [])
        cols = tab.get(tuple(w), [])
        mat = SparseMatrix(len(rows), len(cols))
        tindex = index.get(target, {})
        for c, mon in enumerate(cols):
            word = (eid,) + flatten(mon)
            for out_mon, coeff in normal_order_word(sub, word, order).items():
                r = tindex.get(out_mon)
                if r is None:
                    raise ModuleError("free module: monomial escaped the materialized depth")
                mat.add(r, c, coeff)
        return mat

    return WeightModule(sub, f"U({sub.name})", weights, rule, depth)


def direct_sum(m1: WeightModule, m2: WeightModule) -> WeightModule:
    if m1.alg is not m2.alg and getattr(m1.alg, "parent", m1.alg) is not getattr(m2.alg, "parent", m2.alg):
        raise ModuleError("direct sum needs modules over the same algebra")
    depth = min(m1.depth, m2.depth)
    weights: dict = {}
    for w in set(m1.weights) | set(m2.weights):
        if m1.alg.ell(w) >= -depth:
            weights[w] = [f"L:{b}" for b in m1.basis_labels(w)] + [f"R:{b}" for b in m2.basis_labels(w)]

    def rule(eid, w):
        target = wt_add(w, m1.alg.weight(eid))
        a = m1.action(eid, w)
        b = m2.action(eid, w)
        mat = SparseMatrix(len(weights.get(target, ())), len(weights.get(tuple(w), ())))
        for i, row in enumerate(a.rows):
            for c, v in row.items():
                mat.add(i, c, v)
        off_r, off_c = m1.dim(target), m1.dim(w)
        for i, row in enumerate(b.rows):
            for c, v in row.items():
                mat.add(off_r + i, off_c + c, v)
        return mat

    return WeightModule(m1.alg, f"{m1.name}⊕{m2.name}", weights, rule, depth)


# -- oracle ----------------------------------------------------------------------


def check_commutators(module: WeightModule, gen_window: tuple, weights=None) -> list:
    """Representation-property failures [(x, y, weight)] on materialized data.

    For every generator pair in the degree window and every module weight
    where all intermediate weights stay within depth, compare the commutator
    of action matrices with the action of the bracket.
    """
    alg = module.alg
    lo, hi = gen_window
    alg.ensure_window(min(lo + lo, lo), max(hi + hi, hi))
    gens = alg.elements_in_degrees(lo, hi)
    if weights is None:
        weights = module.weights_list()
    failures = []
    for w in weights:
        for x in gens:
            wx = wt_add(w, alg.weight(x))
            for y in gens:
                if y < x:
                    continue
                wy = wt_add(w, alg.weight(y))
                wxy = wt_add(wx, alg.weight(y))
                if not all(module.in_depth(v) or module.ell(v) > 0 for v in (wx, wy, wxy)):
                    continue
                try:
                    x_after_y = module.action(x, wy).matmul(module.action(y, w))
                    y_after_x = module.action(y, wx).matmul(module.action(x, w))
                except WindowError:
                    continue
                comm = SparseMatrix(x_after_y.nrows, x_after_y.ncols)
                for i, row in enumerate(x_after_y.rows):
                    for c, v in row.items():
                        comm.add(i, c, v)
                for i, row in enumerate(y_after_x.rows):
                    for c, v in row.items():
                        comm.add(i, c, -v)
                expected = SparseMatrix(comm.nrows, comm.ncols)
                for k, cf in alg.bracket_ids(x, y).items():
                    mk = module.action(k, w)
                    for i, row in enumerate(mk.rows):
                        for c, v in row.items():
                            expected.add(i, c, cf * v)
                if comm.rows != expected.rows:
                    failures.append((alg.label(x), alg.label(y), w))
    return failures


# -- characters -------------------------------------------------------------------


class Character:
    """Weight multiplicities relative to the highest weight, to depth D."""

    def __init__(self, depth: int, coefficients: dict):
        self.depth = depth
        self.coefficients = {tuple(w): int(c) for w, c in coefficients.items() if c}

    def coefficient(self, w) -> int:
        return self.coefficients.get(tuple(w), 0)

    def __eq__(self, other):
        return self.coefficients == other.coefficients

    def items(self):
        return sorted(self.coefficients.items())

    def to_csv_rows(self):
        return [list(w) + [c] for w, c in self.items()]

    def __repr__(self):
        return f"Character(depth={self.depth}, {len(self.coefficients)} weights)"


def character(module: WeightModule, depth: int | None = None) -> Character:
    if depth is None:
        depth = module.depth
    if depth > module.depth:
        raise WindowError(f"character to depth {depth} needs module depth >= {depth}")
    coeffs = {
        w: len(basis)
        for w, basis in module.weights.items()
        if module.alg.ell(w) >= -depth
    }
    return Character(depth, coeffs)


def product_formula_character(alg, depth: int) -> Character:
    """Truncated expansion of prod over positive roots of (1-e^{-root})^{-mult}.

    Roots and multiplicities are read off the materialized positive part of
    the algebra; coefficients are exact integers.
    """
    alg.ensure_window(-depth, depth)
    mult: dict = {}
    for e in alg.elements_in_degrees(1, depth):
        mult[alg.weight(e)] = mult.get(alg.weight(e), 0) + 1
    poly = {wt_zero(alg.rank): 1}
    for root in sorted(mult):
        d = alg.ell(root)
        for _ in range(mult[root]):
            out: dict = {}
            for w, c in poly.items():
                k = 0
                wk = w
                while alg.ell(wk) >= -depth:
                    out[wk] = out.get(wk, 0) + c
                    k += 1
                    wk = wt_sub(w, tuple(k * x for x in root))
            poly = out
    return Character(depth, poly)


# -- cohomology tables ---------------------------------------------------------------


class CohomologyTable:
    """Dimensions of (co)homology per (weight, degree) with Euler metadata."""

    def __init__(self, kind: str):
        self.kind = kind
        self.cells: dict = {}
        self.complex_dims: dict = {}

    def set(self, w, n, dim, cdim):
        self.cells[(tuple(w), n)] = dim
        self.complex_dims[(tuple(w), n)] = cdim

    def dim(self, w, n) -> int:
        return self.cells.get((tuple(w), n), 0)

    def nonzero(self):
        return sorted((w, n, d) for (w, n), d in self.cells.items() if d)

    def euler_consistent(self) -> bool:
        weights = {w for (w, _) in self.cells}
        for w in weights:
            h = sum((-1) ** n * d for (ww, n), d in self.cells.items() if ww == w)
            c = sum((-1) ** n * d for (ww, n), d in self.complex_dims.items() if ww == w)
            if h != c:
                return False
        return True

    def rows(self):
        out = []
        for (w, n) in sorted(self.cells):
            out.append((w, n, self.cells[(w, n)], self.complex_dims[(w, n)]))
        return out

    def same_dims(self, other) -> tuple:
        """(equal, diffs) comparing nonzero cells of two tables."""
        keys = set(self.cells) | set(other.cells)
        diffs = []
        for k in sorted(keys):
            a = self.cells.get(k, 0)
            b = other.cells.get(k, 0)
            if a != b:
                diffs.append((k[0], k[1], a, b))
        return (not diffs, diffs)

    def __repr__(self):
        nz = self.nonzero()
        return f"CohomologyTable({self.kind}, {len(nz)} nonzero cells)"


def _subsets_by_weight(alg, elems, max_ell, predicate=None):
    """{weight: [sorted id-tuples]} of subsets of distinct elements with
    |ell(weight)| <= max_ell; elems must be strictly one-signed in degree."""
    elems = sorted(elems, key=alg.key)
    table: dict = {wt_zero(alg.rank): [()]}

    def rec(idx, acc, w, budget):
        if idx >= len(elems):
            return
        e = elems[idx]
        d = abs(alg.degree(e))
        if d <= budget:
            acc.append(e)
            w2 = wt_add(w, alg.weight(e))
            table.setdefault(w2, []).append(tuple(acc))
            rec(idx + 1, acc, w2, budget - d)
            acc.pop()
        rec(idx + 1, acc, w, budget)

    rec(0, [], wt_zero(alg.rank), max_ell)
    if predicate:
        table = {w: [s for s in subs if predicate(w, s)] for w, subs in table.items()}
    return {w: subs for w, subs in table.items() if subs}


def _insert_sign(alg, subset, k):
    """Sorted insert of k into an id-tuple; returns (position sign, tuple) or None."""
    if k in subset:
        return None
    kk = alg.key(k)
    pos = 0
    while pos < len(subset) and alg.key(subset[pos]) < kk:
        pos += 1
    return ((-1) ** pos, subset[:pos] + (k,) + subset[pos:])


def _ce_bases(subs, dims_at, n_top):
    """Index maps {(subset, mu, module basis index) -> position} per degree."""
    bases = {}
    for n in range(0, n_top + 2):
        basis = []
        for mu in sorted(subs):
            for s in subs[mu]:
                if len(s) == n:
                    for b in range(dims_at(mu)):
                        basis.append((s, mu, b))
        bases[n] = {t: i for i, t in enumerate(basis)}
    return bases


def ce_cohomology(npart, module: WeightModule, depth: int, weights=None) -> CohomologyTable:
    """Chevalley-Eilenberg cohomology of a strictly positive subalgebra.

    Computes the full finite complex at every relative weight w with
    -depth <= ell(w) <= 0 where it is nonzero; per weight the cohomological
    degree is bounded by -ell(w), so the Euler check is exact.
    """
    alg = module.alg
    if depth > module.depth:
        raise WindowError(f"ce_cohomology to depth {depth} exceeds module depth {module.depth}")
    npart.ensure_window(-1, depth + 1)
    if npart.elements_in_degrees(-1, 0):
        raise ModuleError("ce_cohomology needs a strictly positively graded subalgebra")
    table = CohomologyTable("ce-cohomology")
    if weights is None:
        weights = _active_weights_cohomology(npart, module, depth)
    for w in sorted(weights):
        budget = -alg.ell(w)
        elems = npart.elements_in_degrees(1, budget) if budget >= 1 else []
        subs = _subsets_by_weight(alg, elems, budget, predicate=lambda mu, s: module.dim(wt_add(w, mu)) > 0)
        n_top = max((len(s) for ss in subs.values() for s in ss), default=0)
        bases = _ce_bases(subs, lambda mu: module.dim(wt_add(w, mu)), n_top)
        mats = {}
        for n in range(0, n_top + 1):
            rows = bases[n + 1]
            cols = bases[n]
            mat = SparseMatrix(len(rows), len(cols))
            for (tup, nu, bprime), r in rows.items():
                for i, x in enumerate(tup):
                    rest = tup[:i] + tup[i + 1 :]
                    mu = wt_sub(nu, alg.weight(x))
                    act = module.action(x, wt_add(w, mu))
                    for b, v in act.rows[bprime].items():
                        c = cols.get((rest, mu, b))
                        if c is not None:
                            mat.add(r, c, (-1) ** i * v)
                for i in range(len(tup)):
                    for j in range(i + 1, len(tup)):
                        rest = tuple(e for idx, e in enumerate(tup) if idx not in (i, j))
                        for k, cf in npart.bracket_ids(tup[i], tup[j]).items():
                            ins = _insert_sign(alg, rest, k)
                            if ins is None:
                                continue
                            sgn, merged = ins
                            c = cols.get((merged, nu, bprime))
                            if c is not None:
                                mat.add(r, c, (-1) ** (i + j) * cf * sgn)
            mats[n] = mat
        for n in range(0, n_top + 1):
            rank_n = mats[n].rank()
            rank_prev = mats[n - 1].rank() if n - 1 in mats else 0
            cdim = len(bases[n])
            table.set(w, n, cdim - rank_n - rank_prev, cdim)
    return table


def _active_weights_cohomology(npart, module, depth):
    alg = module.alg
    npart.ensure_window(1, depth + 1)
    elems = npart.elements_in_degrees(1, depth)
    subs = _subsets_by_weight(alg, elems, depth)
    out = set()
    for nu in module.weights:
        for mu in subs:
            w = wt_sub(nu, mu)
            if -depth <= alg.ell(w) <= 0:
                out.add(w)
    return out


def ce_homology(negpart, module: WeightModule, depth: int, weights=None) -> CohomologyTable:
    """Chevalley-Eilenberg homology of a strictly negative subalgebra.

    The homological differential carries the opposite relative sign between
    its module and bracket terms (otherwise the square is the module action
    of twice the bracket, not zero).
    """
    alg = module.alg
    if depth > module.depth:
        raise WindowError(f"ce_homology to depth {depth} exceeds module depth {module.depth}")
    negpart.ensure_window(-depth - 1, -1)
    if negpart.in_window(0) and negpart.elements_in_degrees(0, 0):
        raise ModuleError("ce_homology needs a strictly negatively graded subalgebra")
    table = CohomologyTable("ce-homology")
    if weights is None:
        weights = _active_weights_homology(negpart, module, depth)
    for w in sorted(weights):
        ell_w = alg.ell(w)
        elems = negpart.elements_in_degrees(max(ell_w, -depth), -1)
        subs = _subsets_by_weight(
            alg,
            elems,
            -max(ell_w, -depth),
            predicate=lambda mu, s: module.dim(wt_sub(w, mu)) > 0,
        )
        n_top = max((len(s) for ss in subs.values() for s in ss), default=0)
        bases = _ce_bases(subs, lambda mu: module.dim(wt_sub(w, mu)), n_top)
        mats = {}
        for n in range(1, n_top + 2):
            rows = bases[n - 1]
            cols = bases[n]
            mat = SparseMatrix(len(rows), len(cols))
            for (tup, mu, b), c in cols.items():
                src = wt_sub(w, mu)
                for i, x in enumerate(tup):
                    rest = tup[:i] + tup[i + 1 :]
                    mu2 = wt_sub(mu, alg.weight(x))
                    act = module.action(x, src)
                    for rr, row_vals in enumerate(act.rows):
                        v = row_vals.get(b)
                        if v:
                            rdx = rows.get((rest, mu2, rr))
                            if rdx is not None:
                                mat.add(rdx, c, (-1) ** i * v)
                for i in range(len(tup)):
                    for j in range(i + 1, len(tup)):
                        rest = tuple(e for idx, e in enumerate(tup) if idx not in (i, j))
                        for k, cf in negpart.bracket_ids(tup[i], tup[j]).items():
                            ins = _insert_sign(alg, rest, k)
                            if ins is None:
                                continue
                            sgn, merged = ins
                            rdx = rows.get((merged, mu, b))
                            if rdx is not None:
                                mat.add(rdx, c, (-1) ** (i + j + 1) * cf * sgn)
            mats[n] = mat
        for n in range(0, n_top + 1):
            cdim = len(bases[n])
            rank_in = mats[n + 1].rank() if n + 1 in mats else 0
            rank_out = mats[n].rank() if n in mats else 0
            table.set(w, n, cdim - rank_in - rank_out, cdim)
    return table


def _active_weights_homology(negpart, module, depth):
    alg = module.alg
    negpart.ensure_window(-depth - 1, -1)
    elems = negpart.elements_in_degrees(-depth, -1)
    subs = _subsets_by_weight(alg, elems, depth)
    out = set()
    for nu in module.weights:
        for mu in subs:
            w = wt_add(nu, mu)
            if -depth <= alg.ell(w) <= 0:
                out.add(w)
    return out
