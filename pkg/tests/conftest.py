import sys


def pytest_terminal_summary(terminalreporter):
    # acceptance tests record one line per criterion; surface them even
    # though passing tests keep their stdout captured
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None) if mod else None
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
