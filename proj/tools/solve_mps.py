#!/usr/bin/env python3
"""MPS-driven MILP solve via scipy's HiGHS bindings.

Usage: solve_mps.py INPUT.mps OUTPUT.sol

Reads the fixed-format MPS subset written by the library (OBJSENSE, ROWS,
COLUMNS with INTORG/INTEND markers, RHS, BOUNDS) and writes the adapter
solution format: one status line, then "name value" pairs.
"""

import sys

import numpy as np
from scipy import sparse
from scipy.optimize import milp, LinearConstraint, Bounds


def parse_mps(path):
    maximize = False
    rows = []  # (sense, name)
    row_idx = {}
    obj_name = None
    cols = []  # name order
    col_idx = {}
    integrality = []
    obj = {}
    entries = []  # (row, col, coeff)
    rhs = {}
    bounds = {}
    section = None
    in_int = False

    with open(path) as f:
        for raw in f:
            line = raw.rstrip("\n")
            if not line or line.startswith("*"):
                continue
            if not line[0].isspace():
                toks = line.split()
                section = toks[0]
                continue
            toks = line.split()
            if section == "OBJSENSE":
                maximize = toks[0] in ("MAX", "MAXIMIZE")
            elif section == "ROWS":
                sense, name = toks
                if sense == "N":
                    obj_name = name
                else:
                    row_idx[name] = len(rows)
                    rows.append((sense, name))
            elif section == "COLUMNS":
                if len(toks) >= 3 and toks[1] == "'MARKER'":
                    in_int = toks[2] == "'INTORG'"
                    continue
                col = toks[0]
                if col not in col_idx:
                    col_idx[col] = len(cols)
                    cols.append(col)
                    integrality.append(1 if in_int else 0)
                j = col_idx[col]
                for k in range(1, len(toks) - 1, 2):
                    row, val = toks[k], float(toks[k + 1])
                    if row == obj_name:
                        obj[j] = obj.get(j, 0.0) + val
                    else:
                        entries.append((row_idx[row], j, val))
            elif section == "RHS":
                for k in range(1, len(toks) - 1, 2):
                    rhs[row_idx[toks[k]]] = float(toks[k + 1])
            elif section == "BOUNDS":
                kind, _, col = toks[0], toks[1], toks[2]
                val = float(toks[3]) if len(toks) > 3 else None
                lo, hi = bounds.get(col, (0.0, np.inf))
                if kind == "UP":
                    hi = val
                elif kind == "LO":
                    lo = val
                elif kind == "FX":
                    lo = hi = val
                elif kind == "MI":
                    lo = -np.inf
                elif kind == "PL":
                    hi = np.inf
                elif kind == "FR":
                    lo, hi = -np.inf, np.inf
                elif kind == "BV":
                    lo, hi = 0.0, 1.0
                    integrality[col_idx[col]] = 1
                bounds[col] = (lo, hi)

    n = len(cols)
    c = np.zeros(n)
    for j, v in obj.items():
        c[j] = v
    if maximize:
        c = -c
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    for name, (l, h) in bounds.items():
        j = col_idx[name]
        lo[j], hi[j] = l, h

    m = len(rows)
    lhs = np.full(m, -np.inf)
    uhs = np.full(m, np.inf)
    for i, (sense, _) in enumerate(rows):
        b = rhs.get(i, 0.0)
        if sense == "L":
            uhs[i] = b
        elif sense == "G":
            lhs[i] = b
        else:
            lhs[i] = uhs[i] = b
    if entries:
        data = np.array([e[2] for e in entries])
        ri = np.array([e[0] for e in entries])
        ci = np.array([e[1] for e in entries])
        A = sparse.csc_matrix((data, (ri, ci)), shape=(m, n))
    else:
        A = sparse.csc_matrix((m, n))
    return maximize, c, A, lhs, uhs, lo, hi, np.array(integrality), cols


def main():
    if len(sys.argv) != 3:
        print("usage: solve_mps.py input.mps output.sol", file=sys.stderr)
        return 2
    maximize, c, A, lhs, uhs, lo, hi, integ, names = parse_mps(sys.argv[1])
    constraints = LinearConstraint(A, lhs, uhs) if A.shape[0] else ()
    res = milp(
        c,
        constraints=constraints,
        bounds=Bounds(lo, hi),
        integrality=integ,
        options={"mip_rel_gap": 1e-9, "presolve": True},
    )
    with open(sys.argv[2], "w") as f:
        if res.status == 0:
            f.write("Optimal\n")
            for name, v in zip(names, res.x):
                if v != 0.0:
                    f.write(f"{name} {float(v):.17g}\n")
        elif res.status == 2:
            f.write("Infeasible\n")
        elif res.status == 3:
            f.write("Unbounded\n")
        elif res.status == 1:
            if res.x is not None:
                f.write("TimeLimit\n")
                for name, v in zip(names, res.x):
                    if v != 0.0:
                        f.write(f"{name} {float(v):.17g}\n")
            else:
                f.write("Error\n")
        else:
            f.write("Error\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
