import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion; printed in the terminal summary."""
    state = {"label": request.node.name, "detail": ""}

    def note(label: str | None = None, detail: str = "") -> None:
        if label is not None:
            state["label"] = label
        state["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    _ACCEPTANCE.append((state["label"], passed, state["detail"]))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        suffix = f"  ({detail})" if detail else ""
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}{suffix}")
