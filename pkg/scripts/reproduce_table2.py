"""Print the power-law classification table and exit nonzero on any mismatch."""

import sys

from zas.cli import main

if __name__ == "__main__":
    sys.exit(main(["table2", *sys.argv[1:]]))
