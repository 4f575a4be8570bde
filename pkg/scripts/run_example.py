#!/usr/bin/env python3
"""Run the built-in worked example and print the mapping step by step."""

import sys

from anypath_vne.cli import main

if __name__ == "__main__":
    sys.exit(main(["example"]))
