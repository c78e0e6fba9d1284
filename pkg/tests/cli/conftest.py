"""
Fixtures for the command-line tests.
"""

import pytest

from hfr_aligner.app import main


@pytest.fixture
def run(capsys):
    """Run the CLI and return (exit code, stdout)."""

    def _run(*argv):
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out

    return _run


@pytest.fixture
def features(tmp_path, run):
    """Two seconds of a rotating dot at 16 FPS."""
    path = tmp_path / "features.f16t"
    code, _ = run("gen", "--seed", 7, "--rps", 0.75, "--dir", "ccw", "--dur", 2, "--out", path)
    assert code == 0
    return path


@pytest.fixture
def static_features(tmp_path, run):
    """Two seconds of a dot that does not move."""
    path = tmp_path / "static.f16t"
    code, _ = run("gen", "--seed", 7, "--rps", 0, "--dur", 2, "--out", path)
    assert code == 0
    return path


@pytest.fixture
def weights(tmp_path, run):
    path = tmp_path / "hfr.f16t"
    code, _ = run("init", "--seed", 3, "--w", 16, "--out", path)
    assert code == 0
    return path
