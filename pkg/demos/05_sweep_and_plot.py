"""
Monotonicity map and a figure, via the command line
===================================================

Writes sweep.csv, fig.svg and fig.json to the current directory.
"""
import csv

import numpy as np

from productline.cli import main

main(["sweep", "--mu-range", "0.5:1:26", "--c-range", "0.1:2:20", "--out", "sweep.csv"])
with open("sweep.csv") as fh:
    rows = list(csv.DictReader(fh))

mus = sorted({float(r["mu"]) for r in rows})
cs = sorted({float(r["c"]) for r in rows})
grid = np.zeros((len(mus), len(cs)), dtype=int)
for r in rows:
    grid[mus.index(float(r["mu"])), cs.index(float(r["c"]))] = r["monotoneNumeric"] == "false"

# rows run from mu = 1 at the top down to 1/2; '#' marks a failure of monotonicity
for mu, line in zip(mus[::-1], grid[::-1]):
    print(f"{mu:4.2f} " + "".join("#" if v else "." for v in line))
print("     c from", cs[0], "to", cs[-1])

main(["plot", "--vl", "0.75", "--vh", "1", "--c", "2", "--out", "fig.svg"])
