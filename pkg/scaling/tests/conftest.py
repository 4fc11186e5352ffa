import os
import os.path
from textwrap import dedent

import pytest
from click.testing import CliRunner

# Setup logging before importing the package

import logging

logging.basicConfig(
    level=logging.DEBUG,
    format="%(relativeCreated)6d %(levelname).1s %(filename)s:%(lineno)s %(message)s",
)

from rocscale.cli import cli


def pytest_collection_modifyitems(items):
    for item in items:
        module_dir = os.path.dirname(item.location[0])
        if module_dir.endswith("functional"):
            item.add_marker(pytest.mark.functional)
        elif module_dir.endswith("unit"):
            item.add_marker(pytest.mark.unit)


@pytest.fixture
def runner():
    yield CliRunner()
    # the CLI binds a handler to the stderr of the last invocation
    logging.getLogger("rocscale").handlers = []


@pytest.fixture
def invoke(runner, tmp_path):
    """Run the CLI with a missing configuration file, i.e. the defaults"""
    conf = str(tmp_path / "missing.conf")

    def _invoke(*args):
        return runner.invoke(cli, ["--conf", conf] + [str(a) for a in args])

    return _invoke


@pytest.fixture
def tiny_pool(tmp_path):
    """(0.9, 1), (0.5, 0), (0.1, 0): pi = 1/3"""
    p = tmp_path / "tiny.csv"
    p.write_text(
        dedent(
            """\
            # three generations
            score,label
            0.9,1
            0.5,0
            0.1,0
            """
        )
    )
    return p


@pytest.fixture
def diag_spec(tmp_path):
    p = tmp_path / "diag.json"
    p.write_text('{"type": "points", "points": [[0, 0], [1, 1]]}')
    return p
