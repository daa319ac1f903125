"""Semi-infinite forms, Clifford operators, the standard complex and its
cohomology, and the semi-invariants functor.

A semi-infinite monomial differs from the vacuum in finitely many slots and
is stored as (added, removed): added is a sorted tuple of positive-degree
basis ids wedged in, removed a sorted tuple of nonpositive-degree ids
deleted from the tail.  Slots are ordered by descending canonical key (the
added part on top, then the whole nonpositive part of the algebra); moving
an operator past k occupied slots costs (-1)^k, which fixes every sign.

The differential has two terms.  The single-slot term removes an occupied
slot y with its position sign and applies the module action of y plus, for
degree-0 slots, a scalar charge.  The pair term removes two occupied slots
and wedges their normally ordered bracket back in: when the bracket lands
in the nonpositive part, its components along the two removed slots are
projected away (orthonormal basis convention) — those slot-restoring pieces
are an infinite, occupancy-independent sum, and the charge is exactly their
regularized value: beta on the vacuum, corrected by the bracket eigenvalue
of every removed tail slot.  Both terms are finite at fixed total weight
because the coefficient module is bounded above.  d^2 = 0 is checked cell
by cell and a failure is reported as a structured AnomalyError carrying the
offending (weight, ghost) cell, not as an assertion.
"""

from __future__ import annotations

from fractions import Fraction

from .liealg import WindowError, wt_add, wt_sub, wt_zero
from .linalg import SparseMatrix
from .modules import CohomologyTable

__all__ = [
    "vacuum",
    "wedge",
    "contract",
    "enumerate_forms",
    "differential",
    "semiinf_cohomology",
    "semiinvariants",
    "AnomalyError",
]

VACUUM = ((), ())


class AnomalyError(Exception):
    """d^2 != 0: the (algebra, beta, module) triple is not consistent."""

    def __init__(self, weight, ghost, residual):
        self.weight = weight
        self.ghost = ghost
        self.residual = residual
        super().__init__(
            f"differential does not square to zero at weight {weight}, ghost {ghost} "
            f"(residual has {residual.nnz} nonzero entries)"
        )


def vacuum(alg=None):
    return VACUUM


def ghost_degree(mono) -> int:
    added, removed = mono
    return len(added) - len(removed)


def relative_weight(alg, mono):
    added, removed = mono
    w = wt_zero(alg.rank)
    for e in added:
        w = wt_add(w, alg.weight(e))
    for e in removed:
        w = wt_sub(w, alg.weight(e))
    return w


def monomial_str(alg, mono) -> str:
    added, removed = mono
    parts = [alg.label(e) for e in added] + [f"~{alg.label(e)}" for e in removed]
    return "ω₀" if not parts else "∧".join(parts) + "∧ω₀"


def _tail_above(alg, x) -> int:
    """Number of tail slots (nonpositive degree) with key strictly above x."""
    dx = alg.degree(x)
    kx = alg.key(x)
    count = 0
    for d in range(dx, 1):
        if d > 0:
            break
        for e in alg.elements_of_degree(d):
            if alg.key(e) > kx:
                count += 1
    return count


def _slots_above(alg, mono, x) -> int:
    """Occupied slots strictly above x in the descending slot order."""
    added, removed = mono
    kx = alg.key(x)
    above = sum(1 for e in added if alg.key(e) > kx)
    if alg.degree(x) <= 0:
        above += _tail_above(alg, x)
        above -= sum(1 for e in removed if alg.key(e) > kx)
    return above


def _insert(tup, x):
    lst = list(tup)
    for i, e in enumerate(lst):
        if x < e:
            lst.insert(i, x)
            break
    else:
        lst.append(x)
    return tuple(lst)


def _delete(tup, x):
    return tuple(e for e in tup if e != x)


def wedge(alg, x, mono):
    """x wedge mono; returns (sign, monomial) or None when the slot is full."""
    added, removed = mono
    if alg.degree(x) > 0:
        if x in added:
            return None
        sign = (-1) ** sum(1 for e in added if alg.key(e) > alg.key(x))
        return sign, (_insert(added, x), removed)
    if x not in removed:
        return None
    sign = (-1) ** _slots_above(alg, mono, x)
    return sign, (added, _delete(removed, x))


def contract(alg, x, mono):
    """Interior product with the dual of x; None when the slot is empty."""
    added, removed = mono
    if alg.degree(x) > 0:
        if x not in added:
            return None
        sign = (-1) ** sum(1 for e in added if alg.key(e) > alg.key(x))
        return sign, (_delete(added, x), removed)
    if x in removed:
        return None
    sign = (-1) ** _slots_above(alg, mono, x)
    return sign, (added, _insert(removed, x))


def wedge_element(alg, x, form: dict) -> dict:
    """Clifford creation on a {monomial: coeff} combination."""
    out: dict = {}
    for mono, c in form.items():
        res = wedge(alg, x, mono)
        if res:
            s, m = res
            v = out.get(m, 0) + s * c
            if v:
                out[m] = v
            elif m in out:
                del out[m]
    return out


def contract_element(alg, x, form: dict) -> dict:
    out: dict = {}
    for mono, c in form.items():
        res = contract(alg, x, mono)
        if res:
            s, m = res
            v = out.get(m, 0) + s * c
            if v:
                out[m] = v
            elif m in out:
                del out[m]
    return out


def _subsets_exact(alg, elems):
    """{(weight, count): [sorted id tuples]} over subsets of distinct elems."""
    table: dict = {}
    elems = sorted(elems, key=alg.key)
    n = len(elems)

    def rec(idx, acc, w):
        table.setdefault((w, len(acc)), []).append(tuple(sorted(acc)))
        if idx >= n:
            return
        for nxt in range(idx, n):
            acc.append(elems[nxt])
            rec(nxt + 1, acc, wt_add(w, alg.weight(elems[nxt])))
            acc.pop()

    rec(0, [], wt_zero(alg.rank))
    return table


def enumerate_forms(alg, mu, n: int) -> list:
    """All monomials of relative weight mu and ghost degree n.

    Finite: added subsets satisfy ell >= |added|, removed subsets live in
    degrees [-ell(mu), 0].  Requires the window [-ell(mu), ell(mu)].
    """
    ell = alg.ell(mu)
    if ell < 0:
        return []
    alg.ensure_window(-ell - 1, ell + 1)
    pos = alg.elements_in_degrees(1, ell) if ell >= 1 else []
    neg = alg.elements_in_degrees(-ell, 0)
    pos_subs = _subsets_exact(alg, pos)
    neg_subs = _subsets_exact(alg, neg)
    out = []
    for (wa, ca), adds in pos_subs.items():
        for (wr, cr), rems in neg_subs.items():
            if ca - cr != n:
                continue
            if wt_sub(wa, wr) != tuple(mu):
                continue
            for a in adds:
                for r in rems:
                    out.append((a, r))
    return sorted(out)


# -- the standard complex ------------------------------------------------------------


class SemiInfComplex:
    """The standard complex at one total weight, all ghost degrees.

    Cochains at (w, n) are indexed by pairs (monomial at mu, module basis b
    at w+mu) over the finitely many contributing relative weights mu.
    """

    def __init__(self, alg, module, w, lmax=None):
        self.alg = alg
        self.module = module
        self.w = tuple(w)
        self.lmax = -alg.ell(w) if lmax is None else lmax
        alg.ensure_window(-2 * self.lmax - 4, 2 * self.lmax + 4)
        self._mus = []
        seen = set()
        for nu in module.weights:
            mu = wt_sub(nu, self.w)
            if mu in seen:
                continue
            seen.add(mu)
            if 0 <= alg.ell(mu) <= self.lmax and module.dim(nu) > 0:
                self._mus.append(mu)
        self._mus.sort()
        self._bases: dict = {}
        self._mats: dict = {}

    def basis(self, n: int) -> dict:
        got = self._bases.get(n)
        if got is None:
            basis = []
            for mu in self._mus:
                dim = self.module.dim(wt_add(self.w, mu))
                for mono in enumerate_forms(self.alg, mu, n):
                    for b in range(dim):
                        basis.append((mono, mu, b))
            got = {t: i for i, t in enumerate(basis)}
            self._bases[n] = got
        return got

    def ghost_range(self):
        ns = [n for n in range(-self._max_removals() - 1, self.lmax + 2) if self.basis(n)]
        return ns

    def _max_removals(self) -> int:
        count = 0
        for d in range(-self.lmax, 1):
            count += len(self.alg.elements_of_degree(d))
        return count

    def matrix(self, n: int) -> SparseMatrix:
        """The differential C^n_w -> C^{n+1}_w."""
        got = self._mats.get(n)
        if got is not None:
            return got
        alg, module, w = self.alg, self.module, self.w
        rows = self.basis(n + 1)
        cols = self.basis(n)
        mat = SparseMatrix(len(rows), len(cols))
        row_monos = {}
        for (mono, mu, b), r in rows.items():
            row_monos.setdefault((mono, mu), []).append((b, r))
        for (mono, mu), brs in row_monos.items():
            removed = mono[1]
            # single-slot term: (y + charge(y)) phi(iota_y omega), where the
            # charge of an occupied degree-0 slot is beta(y) adjusted for the
            # deviation of the occupancy from the vacuum: normal ordering of
            # the quadratic term pushes the slot-restoring bracket components
            # into exactly this shift, beta being its regularized vacuum value
            for y, s, sub in self._occupied_removals(mono, mu):
                mu2 = wt_sub(mu, alg.weight(y))
                src_w = wt_add(w, mu2)
                act = module.action(y, src_w)
                for b, r in brs:
                    for bb, v in act.rows[b].items():
                        c = cols.get((sub, mu2, bb))
                        if c is not None:
                            mat.add(r, c, s * v)
                if alg.degree(y) == 0:
                    charge = alg.beta_value(y)
                    for rem in removed:
                        charge += alg.bracket_ids(y, rem).get(rem, Fraction(0))
                    if charge:
                        if alg.weight(y) != wt_zero(alg.rank):
                            raise AnomalyError(w, n, SparseMatrix(0, 0))
                        for b, r in brs:
                            c = cols.get((sub, mu, b))
                            if c is not None:
                                mat.add(r, c, s * charge)
            # pair term: -phi(:[y_i,y_j]: ^ iota_j iota_i omega)
            for coeff, sub in self._pair_terms(mono, mu):
                for b, r in brs:
                    c = cols.get((sub, mu, b))
                    if c is not None:
                        mat.add(r, c, coeff)
        self._mats[n] = mat
        return mat

    def _occupied_removals(self, mono, mu):
        """(y, contraction sign, monomial minus y) for relevant occupied y."""
        alg = self.alg
        added, removed = mono
        out = []
        dmin = alg.ell(mu) - self.lmax
        for y in added:
            s, sub = contract(alg, y, mono)
            out.append((y, s, sub))
        for d in range(max(dmin, -2 * self.lmax - 4), 1):
            for y in alg.elements_of_degree(d):
                if y in removed:
                    continue
                s, sub = contract(alg, y, mono)
                out.append((y, s, sub))
        return out

    def _pair_terms(self, mono, mu):
        """Contributions of the normally ordered bracket term on one row."""
        alg = self.alg
        added, removed = mono
        maxdeg_occ = max([alg.degree(e) for e in added], default=0)
        maxdeg_occ = max(maxdeg_occ, 0)
        dmin_b = 1
        if removed:
            dmin_b = min(dmin_b, min(alg.degree(e) for e in removed))
        dmin = dmin_b - maxdeg_occ
        lo, hi = alg.window()
        dmin = max(dmin, lo)
        cands = list(added)
        for d in range(dmin, 1):
            for y in alg.elements_of_degree(d):
                if y not in removed:
                    cands.append(y)
        cands.sort(key=alg.key, reverse=True)  # descending: slot order
        out = []
        for ii in range(len(cands)):
            yi = cands[ii]
            for jj in range(ii + 1, len(cands)):
                yj = cands[jj]
                dsum = alg.degree(yi) + alg.degree(yj)
                if not alg.in_window(dsum):
                    continue
                terms = alg.bracket_ids(yi, yj)
                if not terms:
                    continue
                s1, m1 = contract(alg, yi, mono)
                s2, m2 = contract(alg, yj, m1)
                for z, cf in terms.items():
                    if dsum <= 0 and (z == yi or z == yj):
                        continue  # normal ordering projection
                    res = wedge(alg, z, m2)
                    if res is None:
                        continue
                    s3, m3 = res
                    out.append((-(s1 * s2 * s3) * cf, m3))
        return out


def differential(alg, module, w, n: int):
    """Matrix of d at (total weight w, ghost degree n) plus the two bases."""
    cx = SemiInfComplex(alg, module, w)
    return cx.matrix(n), cx.basis(n), cx.basis(n + 1)


def semiinf_cohomology(alg, module, depth: int, weights=None, check_square=True) -> CohomologyTable:
    """Exact cohomology of the standard complex per (weight, ghost degree).

    Raises AnomalyError when d^2 != 0 on some cell (reporting the cell), as
    happens for inconsistent user-supplied beta data.
    """
    if depth > getattr(module, "depth", depth):
        raise WindowError(
            f"semiinf_cohomology to depth {depth} needs the module materialized "
            f"to at least that depth (have {module.depth})"
        )
    table = CohomologyTable("semiinf")
    if weights is None:
        weights = _active_weights(alg, module, depth)
    for w in sorted(weights):
        cx = SemiInfComplex(alg, module, w)
        ns = cx.ghost_range()
        if not ns:
            continue
        mats = {n: cx.matrix(n) for n in range(min(ns) - 1, max(ns) + 1)}
        if check_square:
            for n in range(min(ns) - 1, max(ns)):
                comp = mats[n + 1].matmul(mats[n])
                if not comp.is_zero():
                    raise AnomalyError(w, n, comp)
        for n in ns:
            cdim = len(cx.basis(n))
            rk = mats[n].rank() if n in mats else 0
            rk_prev = mats[n - 1].rank() if n - 1 in mats else 0
            table.set(w, n, cdim - rk - rk_prev, cdim)
    return table


def _active_weights(alg, module, depth: int):
    alg.ensure_window(-depth - 1, depth + 1)
    pos = alg.elements_in_degrees(1, depth) if depth >= 1 else []
    neg = alg.elements_in_degrees(-depth, 0)
    mus = set()
    for (wa, _), _subs in _subsets_exact(alg, pos).items():
        for (wr, _), _s2 in _subsets_exact(alg, neg).items():
            mu = wt_sub(wa, wr)
            if 0 <= alg.ell(mu) <= depth:
                mus.add(mu)
    out = set()
    for nu in module.weights:
        for mu in mus:
            w = wt_sub(nu, mu)
            if -depth <= alg.ell(w) <= 0:
                out.add(w)
    return out


# -- semi-invariants -------------------------------------------------------------------


class SemiInvariants:
    """Per-weight image of invariants inside coinvariants of M ⊗ L_beta."""

    def __init__(self, dims: dict, bases: dict):
        self.dims = {tuple(w): d for w, d in dims.items()}
        self.bases = bases

    def dim(self, w) -> int:
        return self.dims.get(tuple(w), 0)

    def items(self):
        return sorted(self.dims.items())


def semiinvariants(alg, module, depth: int, weights=None) -> SemiInvariants:
    """Image of the g_+-invariants of M ⊗ L_beta in the g_--coinvariants.

    Invariants: common kernel of the positive generators (beta vanishes
    there); coinvariants: quotient by images of xi + beta(xi) for xi in the
    nonpositive part.  Both are finite per weight for modules bounded above.
    """
    if depth > getattr(module, "depth", depth):
        raise WindowError(f"semiinvariants to depth {depth} exceeds module depth {module.depth}")
    alg.ensure_window(-2 * depth - 4, 2 * depth + 4)
    if weights is None:
        weights = [w for w in module.weights if -depth <= alg.ell(w) <= 0]
    dims = {}
    bases = {}
    for w in sorted(weights):
        dim_w = module.dim(w)
        if dim_w == 0:
            continue
        budget = -alg.ell(w)
        inv_rows = []
        for eta in alg.elements_in_degrees(1, budget) if budget >= 1 else []:
            act = module.action(eta, w)
            inv_rows.extend(act.rows)
        inv = SparseMatrix.from_rows(inv_rows, dim_w) if inv_rows else SparseMatrix(0, dim_w)
        kernel = inv.nullspace()
        rel_cols = []
        for xi in alg.elements_in_degrees(max(alg.ell(w), -depth), 0):
            src = wt_sub(w, alg.weight(xi))
            if alg.ell(src) > 0 or alg.ell(src) < -module.depth or module.dim(src) == 0:
                continue
            act = module.action(xi, src)
            bv = alg.beta_value(xi)
            for col in range(act.ncols):
                vec = [Fraction(0)] * dim_w
                for r, row in enumerate(act.rows):
                    v = row.get(col)
                    if v:
                        vec[r] += v
                # beta twist: xi acts as xi + beta(xi) on M ⊗ L_beta
                if bv and alg.weight(xi) == wt_zero(alg.rank):
                    vec[col] += bv
                rel_cols.append(tuple(vec))
        combined = rel_cols + [tuple(k) for k in kernel]
        m_rel = SparseMatrix.from_dense([list(col) for col in zip(*rel_cols)]) if rel_cols else SparseMatrix(dim_w, 0)
        m_all = (
            SparseMatrix.from_dense([list(col) for col in zip(*combined)])
            if combined
            else SparseMatrix(dim_w, 0)
        )
        r_rel = m_rel.rank() if rel_cols else 0
        r_all = m_all.rank()
        d = r_all - r_rel
        dims[w] = d
        pivots = m_all.pivot_columns()
        bases[w] = [combined[p] for p in pivots if p >= len(rel_cols)]
    return SemiInvariants(dims, bases)
