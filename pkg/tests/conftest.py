import sys
from pathlib import Path

# make_goldens.py lives next to the tests and is imported by several of them
sys.path.insert(0, str(Path(__file__).resolve().parent))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one verdict line per release criterion after the run."""
    try:
        from test_acceptance import CRITERIA, RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in CRITERIA:
        if name not in RESULTS:
            terminalreporter.write_line(f"[SKIP] {name}")
            continue
        passed, detail = RESULTS[name]
        verdict = "PASS" if passed else "FAIL"
        suffix = f": {detail}" if detail else ""
        terminalreporter.write_line(f"[{verdict}] {name}{suffix}")
