#!/usr/bin/env python3
"""Writes source.csv: an older, shifted variant of problem.py sampled on a grid."""
import math

with open("source.csv", "w") as f:
    f.write("x_x1,x_x2,objective,c_stress\n")
    for i in range(6):
        for j in range(6):
            x1, x2 = -1 + 2 * i / 5, -1 + 2 * j / 5
            obj = 1.2 * ((x1 - 0.25) ** 2 + (x2 + 0.1) ** 2) + 0.1 * math.sin(5 * x1) + 0.3
            f.write(f"{x1!r},{x2!r},{obj!r},{x1 + x2 - 1.0!r}\n")
