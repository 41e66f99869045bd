import json
from pathlib import Path

import pytest

ORACLE_FILE = Path(__file__).parent / "data" / "oracle_values.json"

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def oracle():
    return json.loads(ORACLE_FILE.read_text())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")


# make tests/oracles.py importable as a plain module
import sys  # noqa: E402

sys.path.insert(0, str(Path(__file__).parent))
