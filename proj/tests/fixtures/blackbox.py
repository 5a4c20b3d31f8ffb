"""Line-oriented JSON blackbox used by the external-problem tests.

usage: blackbox.py [echo|missing|sleep|exit|garbage]
"""
import json
import sys
import time

mode = sys.argv[1] if len(sys.argv) > 1 else "echo"
calls = 0
for line in sys.stdin:
    calls += 1
    x = json.loads(line)["x"]
    if mode == "sleep":
        time.sleep(30)
    if mode == "exit" and calls > 1:
        sys.exit(3)
    if mode == "garbage":
        print("not json", flush=True)
        continue
    reply = {"objective": sum(x)}
    if mode != "missing":
        reply["constraints"] = [x[0] - 1.0]
    print(json.dumps(reply), flush=True)
