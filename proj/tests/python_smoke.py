"""Runs the Python smoke tests when the extension module is installed; exit code 77 means skipped."""
import pathlib
import sys

try:
    import stitkit  # noqa: F401
    import pytest
except ImportError as e:
    print(f"skipping: {e}")
    sys.exit(77)

sys.exit(pytest.main(["-q", str(pathlib.Path(__file__).resolve().parents[1] / "python" / "tests")]))
