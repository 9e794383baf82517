"""
Shared pytest setup: puts src/ and this directory on sys.path so test modules
can import gadkit and the support helpers.
"""

import os
import sys

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
SRC_DIR = os.path.join(TESTS_DIR, '..', 'src')

for path in (SRC_DIR, TESTS_DIR):
    if path not in sys.path:
        sys.path.insert(0, path)
