from hypothesis import settings

# exact arithmetic makes timings uneven; correctness is what these tests check
settings.register_profile("exact", deadline=None)
settings.load_profile("exact")

ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
