import os
import sys

import pytest

core_dir = os.environ.get("WORM_CORE_DIR")
if core_dir and core_dir not in sys.path:
    sys.path.insert(0, core_dir)


@pytest.fixture(scope="session")
def wb():
    try:
        from wormbergman import _core
        return _core
    except ImportError:
        import _core
        return _core
