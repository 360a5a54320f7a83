import pytest


@pytest.fixture
def acceptance(request):
    """Call with (number, title, ok, detail); records a one-line verdict."""
    lines = request.config.stash.setdefault(_KEY, [])

    def record(number, title, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {number}: {title} ({detail})"
        lines.append(line)
        print(line)
        assert ok, line

    return record


_KEY = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
