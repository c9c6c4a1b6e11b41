import pytest

_VERDICTS: dict[int, tuple[str, bool, str]] = {}


class Criterion:
    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.details: list[str] = []

    def note(self, text: str):
        self.details.append(text)

    def verdict(self, passed: bool):
        _VERDICTS[self.number] = (self.title, bool(passed), "; ".join(self.details))
        return passed


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for one acceptance criterion."""
    marker = request.node.get_closest_marker("criterion")
    crit = Criterion(*marker.args)
    yield crit
    if crit.number not in _VERDICTS:
        crit.note("did not reach a verdict")
        crit.verdict(False)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        title, passed, detail = _VERDICTS[number]
        line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
