import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def datasets(tmp_path_factory):
    """Real figure CSVs produced through the funest CLI."""
    root = tmp_path_factory.mktemp("datasets")
    paths = {}
    for n in (1, 2, 3, 4):
        out = root / f"fig{n}.csv"
        subprocess.run(
            [sys.executable, "-m", "funest", "figure", str(n), "--out", str(out)],
            check=True,
            capture_output=True,
        )
        paths[n] = out
    return paths
