#!/usr/bin/env python3
"""Example blackbox: reads {"x": [...]} lines on stdin, answers one JSON line each."""
import json
import math
import sys

for line in sys.stdin:
    x1, x2 = json.loads(line)["x"]
    objective = (x1 - 0.3) ** 2 + (x2 + 0.2) ** 2 + 0.1 * math.sin(5 * x1)
    stress = x1 + x2 - 1.2
    print(json.dumps({"objective": objective, "constraints": [stress]}), flush=True)
