import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request, capsys):
    """Print one criterion line immediately and keep it for the end-of-run summary."""
    store = request.config.stash.setdefault(_LINES, [])

    def emit(line: str):
        store.append(line)
        with capsys.disabled():
            print(f"\n{line}")

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
