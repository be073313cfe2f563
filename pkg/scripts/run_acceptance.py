#!/usr/bin/env python3
"""Run the acceptance suite and show the per-criterion PASS/FAIL lines."""

import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    target = Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"
    sys.exit(pytest.main([str(target), "-v", "-s", *sys.argv[1:]]))
