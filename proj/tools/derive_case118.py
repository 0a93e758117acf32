#!/usr/bin/env python3
"""Derive data/case118_ots.m from the stock MATPOWER case118.m.

The stock file has no thermal ratings (rateA = 0) and quadratic costs.
This script:
  * replaces each generator cost with a linear one, c = c1 + c2 * Pmax
    (average cost at full output),
  * assigns rateA from a base-case, unconstrained DC-OPF at nominal demand:
    rateA = max(FLOOR, ceil(ALPHA * |f| / 10) * 10),
  * checks that the all-lines-closed DC-OPF is feasible at 0.9x and 1.1x
    nominal demand.

Usage: derive_case118.py STOCK_CASE118_M OUT_M
"""
import math
import re
import sys

import numpy as np
from scipy.optimize import linprog

ALPHA = 1.0
FLOOR = 40.0


def read_matrix(text, name):
    m = re.search(r"mpc\.%s\s*=\s*\[(.*?)\];" % name, text, re.S)
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%")[0].strip().rstrip(";")
        if line:
            rows.append([float(v) for v in line.split()])
    return np.array(rows)


def dcopf(bus, gen, cost, branch, rate, scale):
    nb, ng, nl = len(bus), len(gen), len(branch)
    idx = {int(b[0]): i for i, b in enumerate(bus)}
    ref = [i for i, b in enumerate(bus) if int(b[1]) == 3][0]
    bsus = 100.0 / branch[:, 3]
    # variables: p (ng), theta (nb), f (nl)
    nv = ng + nb + nl
    c = np.zeros(nv)
    c[:ng] = cost
    aeq, beq = [], []
    for i in range(nb):
        row = np.zeros(nv)
        for g in range(ng):
            if idx[int(gen[g, 0])] == i:
                row[g] = 1.0
        for l in range(nl):
            if idx[int(branch[l, 0])] == i:
                row[ng + nb + l] -= 1.0
            if idx[int(branch[l, 1])] == i:
                row[ng + nb + l] += 1.0
        aeq.append(row)
        beq.append(bus[i, 2] * scale)
    for l in range(nl):
        row = np.zeros(nv)
        row[ng + nb + l] = 1.0
        row[ng + idx[int(branch[l, 0])]] = -bsus[l]
        row[ng + idx[int(branch[l, 1])]] = bsus[l]
        aeq.append(row)
        beq.append(0.0)
    bounds = [(gen[g, 9], gen[g, 8]) for g in range(ng)]
    bounds += [(0.0, 0.0) if i == ref else (None, None) for i in range(nb)]
    bounds += [(-r, r) if r > 0 else (None, None) for r in rate]
    res = linprog(c, A_eq=np.array(aeq), b_eq=np.array(beq), bounds=bounds,
                  method="highs")
    return res


def main():
    src, out = sys.argv[1], sys.argv[2]
    text = open(src).read()
    bus = read_matrix(text, "bus")
    gen = read_matrix(text, "gen")
    branch = read_matrix(text, "branch")
    gencost = read_matrix(text, "gencost")
    cost = gencost[:, 5] + gencost[:, 4] * gen[:, 8]
    nl = len(branch)

    base = dcopf(bus, gen, cost, branch, np.zeros(nl), 1.0)
    assert base.status == 0, base.message
    flows = base.x[len(gen) + len(bus):]
    rate = np.array([max(FLOOR, math.ceil(ALPHA * abs(f) / 10.0) * 10.0)
                     for f in flows])
    for s in (0.9, 1.0, 1.1):
        r = dcopf(bus, gen, cost, branch, rate, s)
        assert r.status == 0, "infeasible at scale %g" % s
        print("scale %.1f: all-closed dispatch cost %.2f" % (s, r.fun))

    lines = []
    lines.append("function mpc = case118_ots")
    lines.append("%CASE118_OTS  IEEE 118-bus system prepared for DC transmission switching.")
    lines.append("%   Derived from MATPOWER case118.m by tools/derive_case118.py:")
    lines.append("%%   linear costs c = c1 + c2*Pmax; rateA = max(%g, ceil(%g*|f|/10)*10)" % (FLOOR, ALPHA))
    lines.append("%   where f is the unconstrained base-case DC-OPF flow.")
    lines.append("")
    lines.append("mpc.version = '2';")
    lines.append("mpc.baseMVA = 100;")
    lines.append("")
    lines.append("%% bus data")
    lines.append("%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin")
    lines.append("mpc.bus = [")
    for b in bus:
        lines.append("\t" + "\t".join("%g" % v for v in b) + ";")
    lines.append("];")
    lines.append("")
    lines.append("%% generator data")
    lines.append("%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin")
    lines.append("mpc.gen = [")
    for g in gen:
        lines.append("\t" + "\t".join("%g" % v for v in g[:10]) + ";")
    lines.append("];")
    lines.append("")
    lines.append("%% branch data")
    lines.append("%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax")
    lines.append("mpc.branch = [")
    for br, r in zip(branch, rate):
        row = list(br)
        row[5] = r
        lines.append("\t" + "\t".join("%g" % v for v in row) + ";")
    lines.append("];")
    lines.append("")
    lines.append("%% generator cost data")
    lines.append("%\t2\tstartup\tshutdown\tn\tc1\tc0")
    lines.append("mpc.gencost = [")
    for c in cost:
        lines.append("\t2\t0\t0\t2\t%.6g\t0;" % c)
    lines.append("];")
    open(out, "w").write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
