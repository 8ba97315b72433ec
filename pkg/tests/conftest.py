import pytest
from hypothesis import strategies as st

from pimmap import ArraySpec, LayerSpec, load_network


@pytest.fixture(scope="session")
def vgg13():
    return load_network("vgg13")


@pytest.fixture(scope="session")
def resnet18():
    return load_network("resnet18")


@pytest.fixture(scope="session")
def array512():
    return ArraySpec(512, 512)


@st.composite
def small_layers(draw, max_ifm=16, max_k=5, max_ch=8):
    ifm_w = draw(st.integers(1, max_ifm))
    ifm_h = draw(st.integers(1, max_ifm))
    k_w = draw(st.integers(1, min(ifm_w, max_k)))
    k_h = draw(st.integers(1, min(ifm_h, max_k)))
    return LayerSpec(
        "rnd", ifm_w, ifm_h, k_w, k_h,
        draw(st.integers(1, max_ch)), draw(st.integers(1, max_ch)),
    )


small_arrays = st.builds(ArraySpec, st.integers(8, 128), st.integers(4, 64))


# Filled by tests/test_acceptance.py, printed once at the end of the run.
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {line}")
