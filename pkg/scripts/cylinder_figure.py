"""Write the cylinder mass sweep (CSV, JSON, SVG) into the given directory."""

import sys

from zas.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out"
    sys.exit(main(["cylinder-sweep", "--out", out, "--L-max", "20", "--steps", "81", *sys.argv[2:]]))
