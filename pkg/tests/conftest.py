_acceptance_lines = []


def record_acceptance(cid: str, line: str) -> None:
    _acceptance_lines.append((cid, line))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for cid, line in sorted(_acceptance_lines):
        terminalreporter.write_line(f"{cid} {line}")
