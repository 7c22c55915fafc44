import pytest

_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        prev = _acceptance.get(number, (title, True, ""))
        ok = prev[1] and rep.outcome == "passed"
        detail = prev[2]
        if rep.outcome != "passed":
            detail = str(rep.longrepr.reprcrash.message if hasattr(rep.longrepr, "reprcrash") else rep.longrepr)
            detail = detail.splitlines()[0] if detail else ""
        _acceptance[number] = (title, ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, ok, detail = _acceptance[number]
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if not ok and detail:
            line += f"  -- {detail[:160]}"
        terminalreporter.write_line(line)
