import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsedpc.errors import ConfigurationError, DivisionDegenerateError
from sparsedpc.forward import (
    NoiseSpec,
    RawImagePair,
    add_noise,
    add_stack_noise,
    compose_dpc,
    simulate_dpc,
    simulate_raw_pair,
    simulate_stack,
)
from sparsedpc.optics import kernel_from_ptf, single_side_transfer_functions
from sparsedpc.phantoms import KINDS, PhantomSpec, generate_phantom


@pytest.mark.parametrize("kind", KINDS)
def test_phantom_range_and_determinism(kind):
    spec = PhantomSpec(kind, 96, (0.0, 1.0), seed=4)
    a = generate_phantom(spec)
    assert a.shape == (96, 96)
    assert a.min() >= 0 and a.max() <= 1
    assert np.array_equal(a, generate_phantom(spec))


def test_binary_blobs_two_levels():
    img = generate_phantom(PhantomSpec("binary-blobs", 128, (0.0, 2.0), seed=1))
    assert img.min() == 0 and img.max() == 2
    assert set(np.unique(img)) == {0.0, 2.0}


def test_degenerate_range_is_constant():
    img = generate_phantom(PhantomSpec("siemens-star", 64, (0.0, 0.0)))
    assert np.all(img == 0)


def test_full_size_star():
    img = generate_phantom(PhantomSpec("siemens-star", 600, (0.0, 1.0)))
    assert img.shape == (600, 600) and img.min() >= 0 and img.max() <= 1


def test_bad_phantom_specs():
    with pytest.raises(ConfigurationError):
        generate_phantom(PhantomSpec("unicorn", 64))
    with pytest.raises(ConfigurationError):
        PhantomSpec("siemens-star", 64, (1.0, 0.0))


def test_constant_phase_gives_zero(tfs64):
    for tf in tfs64:
        assert np.abs(simulate_dpc(np.full((64, 64), 2.5), tf)).max() <= 1e-10 * 2.5


def test_linearity_and_dc(tfs64, rng):
    p1, p2 = rng.standard_normal((2, 64, 64))
    for tf in tfs64:
        s1, s2 = simulate_dpc(p1, tf), simulate_dpc(p2, tf)
        combo = simulate_dpc(2.0 * p1 - 0.5 * p2, tf)
        scale = np.abs(combo).max()
        assert np.abs(combo - (2.0 * s1 - 0.5 * s2)).max() <= 1e-12 * scale
        assert np.abs(simulate_dpc(2 * p1, tf) - 2 * s1).max() <= 1e-12 * np.abs(2 * s1).max()
        shifted = simulate_dpc(p1 + 17.0, tf)
        assert np.abs(shifted - s1).max() <= 1e-10 * np.abs(s1).max()


def test_impulse_response_equals_kernel(tfs64):
    """Direct spatial shift of the kernel, compared with the simulated image."""
    impulse = np.zeros((64, 64))
    impulse[10, 20] = 1.0
    for tf in tfs64:
        h = kernel_from_ptf(tf).values
        expected = np.roll(h, (10, 20), axis=(0, 1))
        assert np.abs(simulate_dpc(impulse, tf) - expected).max() <= 1e-8


def test_dimension_mismatch(tfs64):
    with pytest.raises(ConfigurationError):
        simulate_dpc(np.zeros((32, 32)), tfs64[0])


def test_raw_pair_background(config64):
    pos, neg = single_side_transfer_functions(config64, "lr")
    pair = simulate_raw_pair(np.zeros((64, 64)), pos, neg)
    assert np.all(pair.i_pos == 1) and np.all(pair.i_neg == 1)
    assert pair.clamped == 0


def test_raw_pair_consistent_with_linear_model(config64, tfs64):
    phase = 0.1 * generate_phantom(PhantomSpec("smooth-bumps", 64, (0.0, 1.0), seed=2))
    pos, neg = single_side_transfer_functions(config64, "lr")
    dpc_raw = compose_dpc(simulate_raw_pair(phase, pos, neg))
    dpc_lin = simulate_dpc(phase, tfs64[0])
    span = dpc_lin.max() - dpc_lin.min()
    assert np.abs(dpc_raw - dpc_lin).max() <= 0.05 * span


def test_raw_pair_clamps_strong_phase(config64):
    pos, neg = single_side_transfer_functions(config64, "lr")
    phase = 40.0 * generate_phantom(PhantomSpec("siemens-star", 64, (0.0, 1.0)))
    with pytest.warns(RuntimeWarning):
        pair = simulate_raw_pair(phase, pos, neg)
    assert pair.clamped > 0
    assert pair.i_pos.min() >= 0 and pair.i_neg.min() >= 0


def test_compose_dpc_arithmetic():
    pair = RawImagePair(np.array([[2.0, 1.0]]), np.array([[1.0, 1.0]]))
    assert np.allclose(compose_dpc(pair), [[1 / 3, 0.0]])
    with pytest.raises(DivisionDegenerateError, match="1 pixels"):
        compose_dpc(RawImagePair(np.array([[0.0, 1.0]]), np.array([[0.0, 1.0]])))


def test_zero_noise_is_identity(rng):
    img = rng.standard_normal((32, 32))
    assert np.array_equal(add_noise(img, NoiseSpec("range-fraction", 0.0, 1)), img)
    # a constant image has no signal rms, hence sigma = 0 in SNR mode
    flat = np.ones((8, 8))
    assert np.array_equal(add_noise(flat, NoiseSpec("snr-db", 10, 1)), flat)


def test_range_fraction_sigma():
    img = np.linspace(0, 1, 512 * 512).reshape(512, 512)
    out = add_noise(img, NoiseSpec("range-fraction", 0.2, 3))
    assert np.std(out - img) == pytest.approx(0.2, rel=0.02)


def test_snr_sigma(rng):
    img = rng.standard_normal((512, 512))
    img = (img - img.mean()) / img.std()
    out = add_noise(img, NoiseSpec("snr-db", 20.0, 9))
    assert np.std(out - img) == pytest.approx(0.1, rel=0.02)


def test_noise_deterministic_per_seed(tfs64):
    phase = generate_phantom(PhantomSpec("bar-target", 64))
    stack = simulate_stack(phase, tfs64)
    a = add_stack_noise(stack, NoiseSpec("snr-db", 10, 5)).images
    b = add_stack_noise(stack, NoiseSpec("snr-db", 10, 5)).images
    c = add_stack_noise(stack, NoiseSpec("snr-db", 10, 6)).images
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    # the two axes get independent noise
    assert not np.allclose(a[0] - stack.images[0], a[1] - stack.images[1])


def test_noise_spec_validation():
    with pytest.raises(ConfigurationError):
        NoiseSpec("poisson", 1.0)
    with pytest.raises(ConfigurationError):
        NoiseSpec("range-fraction", -0.1)
    with pytest.raises(ConfigurationError):
        NoiseSpec("snr-db", np.nan)


@settings(max_examples=20, deadline=None)
@given(a=st.floats(-5, 5), b=st.floats(-5, 5), seed=st.integers(0, 2**32 - 1))
def test_linearity_property(tfs64, a, b, seed):
    r = np.random.default_rng(seed)
    p1, p2 = r.standard_normal((2, 64, 64))
    tf = tfs64[1]
    s1, s2 = simulate_dpc(p1, tf), simulate_dpc(p2, tf)
    lhs = simulate_dpc(a * p1 + b * p2, tf)
    # relative to the larger term, so cancellation between them is harmless
    scale = max(np.abs(a * s1).max(), np.abs(b * s2).max())
    assert np.abs(lhs - (a * s1 + b * s2)).max() <= 1e-12 * scale
