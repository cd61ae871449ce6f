import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=300, deadline=None)
settings.load_profile("default")

probabilities = st.floats(min_value=1e-6, max_value=1 - 1e-6)


@st.composite
def payoffs(draw):
    """(v, gain, loss) with loss < 0 < v < gain."""
    gain = draw(st.floats(min_value=0.01, max_value=100.0))
    loss = -draw(st.floats(min_value=0.01, max_value=100.0))
    v = gain * draw(st.floats(min_value=1e-4, max_value=1 - 1e-4))
    return v, gain, loss


@pytest.fixture
def tmp_log(tmp_path):
    def write(lines, name="trials.jsonl"):
        path = tmp_path / name
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path

    return write


_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's verdict, then assert it."""

    def check(label: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
