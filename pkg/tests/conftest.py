import _support


def pytest_terminal_summary(terminalreporter):
    if _support.ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_support.ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
