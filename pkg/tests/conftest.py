import numpy as np
import pytest
from hypothesis import strategies as st

from hurwitz_pia.quaternion import HurwitzInt


@st.composite
def hurwitz_ints(draw, bound: int = 40):
    parity = draw(st.integers(0, 1))
    coords = [draw(st.integers(-bound // 2, bound // 2)) * 2 + parity for _ in range(4)]
    return HurwitzInt(*coords)


@st.composite
def nonzero_hurwitz(draw, bound: int = 40):
    x = draw(hurwitz_ints(bound))
    if x.is_zero():
        x = HurwitzInt(2, 0, 0, 0)
    return x


def random_doubled(rng: np.random.Generator, shape, box: int) -> np.ndarray:
    """Uniform doubled Hurwitz coordinates with |d| <= 2*box + 1 (test helper)."""
    parity = rng.integers(0, 2, size=shape[:-1] + (1,))
    return 2 * rng.integers(-box, box + 1, size=shape) + parity


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def report(capsys):
    """Print and record one verdict line, then fail the test if the verdict is FAIL."""

    def _report(criterion: int, ok: bool, detail: str) -> None:
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[criterion] = line
        with capsys.disabled():
            print(f"\n{line}")
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
