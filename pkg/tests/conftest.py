import pytest

_CRITERIA = {}


class Criterion:
    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.state = "FAIL"
        self.notes = []

    def note(self, text):
        self.notes.append(text)


def _record(item):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return None
    number, title = marker.args
    return _CRITERIA.setdefault(number, Criterion(number, title))


@pytest.fixture
def criterion(request):
    """The acceptance criterion this test checks; notes show up in the summary."""
    return _record(request.node)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    c = _record(item)
    if c is None:
        return
    if report.when == "call" or report.outcome != "passed":
        c.state = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIPPED"}[report.outcome]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        c = _CRITERIA[number]
        line = f"criterion {number:2d} {c.state:7s} {c.title}"
        if c.notes:
            line += "  [" + "; ".join(c.notes) + "]"
        terminalreporter.write_line(line)
