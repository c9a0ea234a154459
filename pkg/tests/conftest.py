import sys
from pathlib import Path

# Allow running pytest from a fresh checkout without installing first.
try:
    import catmouse  # noqa: F401
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
