#!/usr/bin/env python3
"""Example objective plugin: mean x position as fitness, then two features.

Called as `mean_x_objective.py <result.feather>`; prints one float per line.
"""
import sys

import pyarrow.feather as feather

table = feather.read_table(sys.argv[1])
xs = table.column("x").to_pylist()
ys = table.column("y").to_pylist()
if not xs:
    print("-inf")
else:
    print(sum(xs) / len(xs))
    print(max(xs))
    print(max(ys))
