"""
fascovert: secure and covert transmission with a fluid-antenna transmitter.

Puts the repository root on `sys.path` so that `src.`-prefixed imports
resolve when `src/main.py` is run as a script, and when worker processes
re-import the package.
"""

import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

_REPO_ROOT = Path(__file__).resolve().parent.parent

if str(_REPO_ROOT) not in sys.path:
    sys.path.append(str(_REPO_ROOT))

try:
    __version__ = version("fascovert")
except PackageNotFoundError:
    __version__ = "0.0.0+local"
