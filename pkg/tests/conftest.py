import sys


def pytest_terminal_summary(terminalreporter):
    """Collect the acceptance verdicts into one block at the end of the run."""
    mod = sys.modules.get("test_acceptance")
    if mod and mod.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(mod.VERDICTS):
            terminalreporter.write_line(mod.VERDICTS[n])
