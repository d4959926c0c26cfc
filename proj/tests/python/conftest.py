import os
import pathlib

import pytest


@pytest.fixture(scope="session")
def toys():
    root = os.environ.get("COPLAN_DATA_DIR") or str(pathlib.Path(__file__).resolve().parents[2] / "data")
    return pathlib.Path(root) / "toys"
