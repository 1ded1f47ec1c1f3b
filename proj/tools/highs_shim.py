#!/usr/bin/env python3
"""Solve an LP file with highspy and write a JSON solution document.

usage: highs_shim.py model.lp out.json [--time-limit S] [--gap G]
"""
import argparse
import json
import math
import sys


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("lp")
    ap.add_argument("out")
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--gap", type=float, default=1e-6)
    args = ap.parse_args()

    try:
        import highspy
    except ImportError as e:
        json.dump({"status": "error", "message": f"highspy unavailable: {e}"}, open(args.out, "w"))
        return 1

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("threads", 1)
    if h.readModel(args.lp) == highspy.HighsStatus.kError:
        json.dump({"status": "error", "message": "cannot read model"}, open(args.out, "w"))
        return 1
    h.run()

    ms = h.getModelStatus()
    info = h.getInfo()
    has_sol = info.primal_solution_status == 2
    names = [h.getColName(i)[1] for i in range(h.getNumCol())]
    doc = {"message": h.modelStatusToString(ms)}
    MS = highspy.HighsModelStatus
    if ms == MS.kOptimal:
        doc["status"] = "optimal"
    elif ms in (MS.kInfeasible,):
        doc["status"] = "infeasible"
    elif ms in (MS.kTimeLimit, MS.kIterationLimit, MS.kSolutionLimit, MS.kInterrupt):
        doc["status"] = "feasible" if has_sol else "timeout"
    else:
        doc["status"] = "error"
    if doc["status"] in ("optimal", "feasible"):
        sol = h.getSolution().col_value
        doc["values"] = {n: v for n, v in zip(names, sol)}
        doc["objective"] = info.objective_function_value
        bound = getattr(info, "mip_dual_bound", None)
        if bound is not None and math.isfinite(bound):
            doc["best_bound"] = bound
    with open(args.out, "w") as f:
        json.dump(doc, f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
