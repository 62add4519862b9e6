"""Boundary-factor table for a few bump parameters plus the bisected sign flip."""

import sys

from zas.cli import main
from zas.experiments import sign_flip
from zas.models import bump_threshold

if __name__ == "__main__":
    code = main(["counterexample", "--eps", "0.1,0.5,0.8,0.85,0.87,0.9,1.0", *sys.argv[1:]])
    print(f"sign flip near eps = {sign_flip(xtol=1e-5):.5f} (closed form {bump_threshold():.8f})")
    sys.exit(code)
