"""Stdio generation stub: echoes each input prefixed with 'echo::'."""
import json
import sys


def main() -> int:
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        resp = {"id": req["id"], "outputs": [f"echo::{t}" for t in req["inputs"]]}
        sys.stdout.write(json.dumps(resp) + "\n")
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
