import itertools
import math

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture
def acceptance_record():
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)


def brute_force_count(M, xi, kind, L, pad=3):
    """Count m in Z^2 with m M + xi in the support, scanning a generous box.

    The box is the integer hull of the preimage of the support's bounding
    rectangle, widened by ``pad``; membership uses the plain definitions.
    """
    M = np.asarray(M, dtype=float)
    xi = np.asarray(xi, dtype=float)
    Minv = np.linalg.inv(M)
    ys = (-L / 2, L / 2) if kind == "rectangle" else (-L, L)
    corners = np.array([(x, y) for x, y in itertools.product((0.0, 1.0), ys)])
    pre = (corners - xi) @ Minv
    lo = np.floor(pre.min(axis=0)) - pad
    hi = np.ceil(pre.max(axis=0)) + pad
    a, b = np.meshgrid(np.arange(lo[0], hi[0] + 1), np.arange(lo[1], hi[1] + 1), indexing="ij")
    w = np.stack([a.ravel(), b.ravel()], axis=1) @ M + xi
    x, y = w[:, 0], w[:, 1]
    inx = (x > 0) & (x <= 1)
    if kind == "rectangle":
        hit = inx & (y >= -L / 2) & (y <= L / 2)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            r = y / x
        hit = inx & (r > -L) & (r <= L)
    return int(hit.sum())


def direct_window_count(values, x0, ell, closed):
    """Loop-based circular window count used as an oracle."""
    lo = (x0 - ell / 2) % 1.0
    n = 0
    for v in values:
        d = (v - lo) % 1.0
        n += d <= ell if closed else d < ell
    return n


SQRT2 = math.sqrt(2.0)
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0
