"""Collects the acceptance verdicts and prints one line per criterion at the end of the run."""

import pytest

_VERDICTS: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def criterion(request):
    """Tag an acceptance test: ``criterion(k, title)`` then ``criterion.detail(text)``."""

    class Recorder:
        def __call__(self, number, title):
            request.node.user_properties.append(("criterion", (number, title)))
            return self

        def detail(self, text):
            request.node.user_properties.append(("detail", text))
            print(text)

    return Recorder()


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    number, title = props["criterion"]
    details = "; ".join(v for k, v in report.user_properties if k == "detail")
    if report.when == "call" or report.outcome != "passed":
        prev = _VERDICTS.get(number)
        if prev is None or prev[0] == "PASS":
            _VERDICTS[number] = ("PASS" if report.passed else "FAIL", title, details)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        verdict, title, details = _VERDICTS[number]
        line = f"criterion {number} {verdict}: {title}"
        terminalreporter.write_line(line + (f" ({details})" if details else ""))
