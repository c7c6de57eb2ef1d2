import pytest

from eccforge.ecmath import CurveParams, ECPoint

# y^2 = x^3 + 2x + 2 over F_17: 19 points, so every affine point generates.
TOY = CurveParams(2, 2, 17, ECPoint(5, 1), 19, 1)

# y^2 = x^3 + x + 34 over F_4099 has prime order 4049 (counted by brute force).
MID = CurveParams(1, 34, 4099, ECPoint(1, 6), 4049, 1)


@pytest.fixture
def toy():
    return TOY


@pytest.fixture
def mid():
    return MID


def brute_points(a, b, p):
    """Every affine point of y^2 = x^3 + ax + b over F_p."""
    return [(x, y) for x in range(p) for y in range(p) if (y * y - x ** 3 - a * x - b) % p == 0]


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
