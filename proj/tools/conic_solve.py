#!/usr/bin/env python3
"""Conic-solver driver.

Reads a problem in the standard primal form

    min c'x   s.t.   A x + s = b,   s in NonNeg(l) x PSD(m1) x PSD(m2) ...

where PSD slices use the scaled lower-triangle column-major vectorization
(off-diagonals times sqrt(2)), dispatches it to one of the supported
backends, and writes the solution as JSON. This file is the only place a
third-party optimizer is touched.
"""

import argparse
import json
import math
import sys
import time

import numpy as np
from scipy import sparse


def load_problem(path):
    with open(path) as f:
        doc = json.load(f)
    n = doc["num_vars"]
    rows = np.asarray(doc["A"]["rows"], dtype=np.int64)
    cols = np.asarray(doc["A"]["cols"], dtype=np.int64)
    vals = np.asarray(doc["A"]["vals"], dtype=np.float64)
    b = np.asarray(doc["b"], dtype=np.float64)
    A = sparse.csc_matrix((vals, (rows, cols)), shape=(len(b), n))
    return {
        "n": n,
        "c": np.asarray(doc["objective"], dtype=np.float64),
        "A": A,
        "b": b,
        "nonneg": int(doc["nonneg_rows"]),
        "psd": [int(m) for m in doc["psd_dims"]],
        "options": doc.get("options", {}),
    }


def clarabel_row_permutation(p):
    """Wire format is lower-triangle column-major; clarabel wants the upper
    triangle column-major. Both enumerate the same (r, c) pairs of a
    symmetric matrix, so the fix is a pure row permutation."""
    perm = list(range(p["nonneg"]))
    offset = p["nonneg"]
    for m in p["psd"]:
        for c in range(m):
            for r in range(c, m):
                perm.append(offset + r * (r + 1) // 2 + c)
        offset += m * (m + 1) // 2
    return np.asarray(perm, dtype=np.int64)


def solve_clarabel(p):
    import clarabel

    cones = []
    if p["nonneg"] > 0:
        cones.append(clarabel.NonnegativeConeT(p["nonneg"]))
    for m in p["psd"]:
        cones.append(clarabel.PSDTriangleConeT(m))
    perm = clarabel_row_permutation(p)
    A = p["A"].tocoo()
    A = sparse.csc_matrix((A.data, (perm[A.row], A.col)), shape=A.shape)
    b = np.empty_like(p["b"])
    b[perm] = p["b"]
    settings = clarabel.DefaultSettings()
    settings.verbose = bool(p["options"].get("verbose", False))
    settings.max_iter = int(p["options"].get("max_iterations", 200))
    tol = float(p["options"].get("tolerance", 1e-8))
    settings.tol_gap_abs = tol
    settings.tol_gap_rel = tol
    settings.tol_feas = tol
    P = sparse.csc_matrix((p["n"], p["n"]))
    solver = clarabel.DefaultSolver(P, p["c"], A, b, cones, settings)
    t0 = time.perf_counter()
    sol = solver.solve()
    elapsed = time.perf_counter() - t0
    status = str(sol.status)
    mapping = {
        "Solved": "optimal",
        "AlmostSolved": "near_optimal",
        "PrimalInfeasible": "infeasible",
        "AlmostPrimalInfeasible": "infeasible",
        "DualInfeasible": "unbounded",
        "AlmostDualInfeasible": "unbounded",
    }
    return {
        "status": mapping.get(status, "numerical_failure"),
        "backend_status": status,
        "x": list(np.asarray(sol.x, dtype=np.float64)),
        "objective": float(sol.obj_val),
        "solve_seconds": elapsed,
        "iterations": int(sol.iterations),
    }


def solve_scs(p):
    import scs

    cone = {}
    if p["nonneg"] > 0:
        cone["l"] = p["nonneg"]
    if p["psd"]:
        cone["s"] = p["psd"]
    tol = float(p["options"].get("tolerance", 1e-8))
    # SCS is first order; don't push its tolerances below what it can reach.
    tol = max(tol, 1e-9)
    solver = scs.SCS(
        dict(P=None, A=p["A"], b=p["b"], c=p["c"]),
        cone,
        verbose=bool(p["options"].get("verbose", False)),
        max_iters=int(p["options"].get("max_iterations", 200)) * 500,
        eps_abs=tol,
        eps_rel=tol,
    )
    t0 = time.perf_counter()
    out = solver.solve()
    elapsed = time.perf_counter() - t0
    raw = out["info"]["status"]
    if raw == "solved":
        status = "optimal"
    elif "inaccurate" in raw and "solved" in raw:
        status = "near_optimal"
    elif "infeasible" in raw:
        status = "infeasible"
    elif "unbounded" in raw:
        status = "unbounded"
    else:
        status = "numerical_failure"
    return {
        "status": status,
        "backend_status": raw,
        "x": list(np.asarray(out["x"], dtype=np.float64)),
        "objective": float(out["info"].get("pobj", math.nan)),
        "solve_seconds": elapsed,
        "iterations": int(out["info"].get("iter", 0)),
    }


def solve_cvxopt(p):
    from cvxopt import matrix, solvers, spmatrix

    rt2 = math.sqrt(2.0)
    nonneg = p["nonneg"]
    # Expand each scaled-svec PSD slice into cvxopt's full column-major
    # vectorization of the symmetric matrix.
    blocks = []  # (svec offset, full offset, m)
    svec_off = nonneg
    full_off = nonneg
    for m in p["psd"]:
        blocks.append((svec_off, full_off, m))
        svec_off += m * (m + 1) // 2
        full_off += m * m
    total_rows = full_off

    def expand_row(row):
        """svec row index -> list of (full row index, scale)."""
        if row < nonneg:
            return [(row, 1.0)]
        for svec0, full0, m in blocks:
            length = m * (m + 1) // 2
            if svec0 <= row < svec0 + length:
                k = row - svec0
                c = 0
                acc = 0
                while acc + (m - c) <= k:
                    acc += m - c
                    c += 1
                r = c + (k - acc)
                if r == c:
                    return [(full0 + c * m + r, 1.0)]
                return [(full0 + c * m + r, 1.0 / rt2), (full0 + r * m + c, 1.0 / rt2)]
        raise ValueError(f"row {row} outside all cones")

    A = p["A"].tocoo()
    g_i, g_j, g_v = [], [], []
    for r, c, v in zip(A.row, A.col, A.data):
        for rr, scale in expand_row(int(r)):
            g_i.append(rr)
            g_j.append(int(c))
            g_v.append(float(v) * scale)
    h = np.zeros(total_rows)
    for r, v in enumerate(p["b"]):
        for rr, scale in expand_row(r):
            h[rr] = v * scale

    G = spmatrix(g_v, g_i, g_j, (total_rows, p["n"]))
    solvers.options["show_progress"] = bool(p["options"].get("verbose", False))
    solvers.options["maxiters"] = int(p["options"].get("max_iterations", 200))
    tol = float(p["options"].get("tolerance", 1e-8))
    solvers.options["abstol"] = max(tol, 1e-9)
    solvers.options["reltol"] = max(tol, 1e-9)
    solvers.options["feastol"] = max(tol, 1e-9)
    dims = {"l": nonneg, "q": [], "s": p["psd"]}
    t0 = time.perf_counter()
    res = solvers.conelp(matrix(p["c"]), G, matrix(h), dims=dims)
    elapsed = time.perf_counter() - t0
    raw = res["status"]
    if raw == "optimal":
        status = "optimal"
    elif raw == "primal infeasible":
        status = "infeasible"
    elif raw == "dual infeasible":
        status = "unbounded"
    elif raw == "unknown" and res["x"] is not None:
        status = "near_optimal"
    else:
        status = "numerical_failure"
    x = np.asarray(res["x"]).ravel() if res["x"] is not None else np.zeros(p["n"])
    return {
        "status": status,
        "backend_status": raw,
        "x": list(x),
        "objective": float(res["primal objective"]) if res["primal objective"] is not None else math.nan,
        "solve_seconds": elapsed,
        "iterations": int(res.get("iterations", 0)),
    }


BACKENDS = {"clarabel": solve_clarabel, "scs": solve_scs, "cvxopt": solve_cvxopt}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--backend", default="clarabel", choices=sorted(BACKENDS))
    parser.add_argument("problem")
    parser.add_argument("solution")
    args = parser.parse_args()

    problem = load_problem(args.problem)
    result = BACKENDS[args.backend](problem)
    result["backend"] = args.backend
    # keep the file valid JSON: non-finite values have no representation
    if not math.isfinite(result["objective"]):
        result["objective"] = 0.0
    if any(not math.isfinite(v) for v in result["x"]):
        result["x"] = [v if math.isfinite(v) else 0.0 for v in result["x"]]
        if result["status"] in ("optimal", "near_optimal"):
            result["status"] = "numerical_failure"
    with open(args.solution, "w") as f:
        json.dump(result, f)
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except ImportError as e:
        print(f"backend unavailable: {e}", file=sys.stderr)
        sys.exit(3)
    except Exception as e:  # surface everything to the C++ side
        print(f"driver error: {type(e).__name__}: {e}", file=sys.stderr)
        sys.exit(2)
