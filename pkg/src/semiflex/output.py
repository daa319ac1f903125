"""CSV / JSON-lines emitters for characters, cohomology tables and modules.

Row order is deterministic (sorted by weight coordinates, then degree) so
identical jobs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction


def character_rows(alg, char):
    rows = []
    for w, c in sorted(char.coefficients.items()):
        rows.append(list(w) + [alg.ell(w), c])
    return rows


def table_rows(table):
    rows = []
    for (w, n) in sorted(table.cells):
        rows.append(list(w) + [n, table.cells[(w, n)]])
    return rows


def module_rows(module):
    rows = []
    for w in module.weights_list():
        rows.append(list(w) + [module.alg.ell(w), module.dim(w)])
    return rows


def write_csv(path, rows, rank: int):
    header = [f"weight_{i+1}" for i in range(rank)] + ["degree", "dimension"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def write_jsonl(path, rows, rank: int):
    with open(path, "w") as fh:
        for row in rows:
            fh.write(
                json.dumps({"weight": row[:rank], "degree": row[rank], "dimension": row[rank + 1]})
                + "\n"
            )


def dump_module_jsonl(path, module, gen_window):
    """Per-weight basis labels and sparse action matrices (JSON-lines)."""
    alg = module.alg
    lo, hi = gen_window
    gens = alg.elements_in_degrees(lo, hi)
    with open(path, "w") as fh:
        for w in module.weights_list():
            actions = {}
            for z in gens:
                try:
                    mat = module.action(z, w)
                except Exception:
                    continue
                entries = [
                    [r, c, f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else str(v)]
                    for r, row in enumerate(mat.rows)
                    for c, v in sorted(row.items())
                ]
                if entries:
                    actions[alg.label(z)] = entries
            fh.write(
                json.dumps(
                    {
                        "weight": list(w),
                        "dim": module.dim(w),
                        "basis": module.basis_labels(w),
                        "actions": actions,
                    }
                )
                + "\n"
            )


def dump_forms_jsonl(path, alg, table, module, depth):
    """Optional basis dump for cohomology tables: monomial labels per cell."""
    from .forms import SemiInfComplex, monomial_str

    with open(path, "w") as fh:
        weights = sorted({w for (w, _n) in table.cells})
        for w in weights:
            cx = SemiInfComplex(alg, module, w)
            for n in sorted({n for (ww, n) in table.cells if ww == w}):
                basis = [
                    {"monomial": monomial_str(alg, mono), "weight": list(mu), "module_index": b}
                    for (mono, mu, b) in cx.basis(n)
                ]
                fh.write(json.dumps({"weight": list(w), "ghost": n, "basis": basis}) + "\n")
