import math

import pytest
from hypothesis import strategies as st

from swapgame import ContractTerms, GameKernel, ModelParams, build_coefficients


@pytest.fixture(scope="session")
def model():
    return ModelParams.calibrated(0.03, 0.2, 1.0, 2.0)


@pytest.fixture(scope="session")
def coeffs(model):
    return build_coefficients(model)


@pytest.fixture(scope="session")
def terms():
    return ContractTerms.from_ratio(0.05, 1.0, 0.5, 0.1, 0.1)


@pytest.fixture(scope="session")
def kernel(coeffs, terms):
    return GameKernel(coeffs, terms)


@st.composite
def models(draw, jumps=True):
    r = draw(st.floats(0.01, 0.1))
    nu = draw(st.floats(0.05, 0.5))
    lam = draw(st.floats(0.1, 3.0)) if jumps else 0.0
    eta = draw(st.floats(0.5, 5.0))
    mu = draw(st.floats(-0.2, 0.5))
    return ModelParams(r=r, mu=mu, nu=nu, lam=lam, eta=eta)


@st.composite
def step_down_terms(draw):
    p = draw(st.floats(0.005, 0.2))
    alpha = draw(st.floats(0.5, 2.0))
    q = draw(st.floats(0.0, 0.9))
    ac = (1 - q) * alpha
    gs = draw(st.floats(0.0, 0.9)) * ac
    gb = draw(st.floats(0.0, 0.3))
    if gb + gs < 1e-3:
        gb = 0.05
    return ContractTerms.from_ratio(p, alpha, q, gb, gs)


def finite(x):
    return x is not None and math.isfinite(x)


ACCEPTANCE: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
