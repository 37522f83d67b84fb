"""Make the src layout importable when the package is not installed."""

import os
import sys

try:
    import isospec  # noqa: F401
except ImportError:
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))
