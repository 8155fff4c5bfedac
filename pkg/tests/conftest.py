import numpy as np
import pytest

from sparsedpc.optics import (
    OpticalConfig,
    dpc_transfer_functions,
    make_frequency_grid,
    make_pupil,
    make_source_pair,
    nyquist_mask,
)


def signed_index(n):
    """Integer frequency index of each unshifted DFT sample."""
    return np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)


def ptf_bruteforce(config, s_pos, s_neg):
    """Literal double sum ``A(k) = sum_q S(q) P(q) P(q + k)`` over the lattice.

    The pupil at ``q + k`` is evaluated from its analytic disc, not read off
    the grid, so wrap-around cannot leak in.
    """
    h, w = config.shape
    d = config.sampling_um
    dkx, dky = 1.0 / (w * d), 1.0 / (h * d)
    my, mx = np.meshgrid(signed_index(h), signed_index(w), indexing="ij")
    my, mx = my.ravel(), mx.ravel()

    def pupil(iy, ix):
        return ((ix * dkx) ** 2 + (iy * dky) ** 2 <= config.cutoff**2).astype(float)

    src = (s_pos - s_neg).ravel() * pupil(my, mx)

    def a_of(sign):
        p_shift = pupil(my[:, None] + sign * my[None, :], mx[:, None] + sign * mx[None, :])
        return (src[:, None] * p_shift).sum(axis=0) * dkx * dky

    b = float(np.sum((s_pos + s_neg).ravel() * pupil(my, mx) ** 2)) * dkx * dky
    return (1j * (a_of(1) - a_of(-1)) / b).reshape(h, w)


_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; printed at the end of the run."""

    def record(label, ok, detail=""):
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def small_config():
    return OpticalConfig(width=32, height=32)


@pytest.fixture(scope="session")
def config64():
    return OpticalConfig(width=64, height=64)


@pytest.fixture(scope="session")
def tfs64(config64):
    return dpc_transfer_functions(config64)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def symmetric_residue(values):
    """max |H(k) + H(-k)| over paired samples, relative to max |H|."""
    from sparsedpc.optics import mirror

    mask = ~nyquist_mask(values.shape)
    diff = np.abs(values + mirror(values))[mask]
    return float(diff.max() / np.abs(values).max())


__all__ = [
    "make_frequency_grid",
    "make_pupil",
    "make_source_pair",
    "ptf_bruteforce",
    "signed_index",
    "symmetric_residue",
]
