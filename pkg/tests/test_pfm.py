import numpy as np
import pytest

from sparsedpc.pfm import PfmError, read_pfm, write_pfm


def test_round_trip_float32_exact(tmp_path):
    img = np.random.default_rng(0).standard_normal((7, 5)).astype(np.float32)
    write_pfm(tmp_path / "a.pfm", img)
    back = read_pfm(tmp_path / "a.pfm")
    assert back.dtype == np.float64 and np.array_equal(back, img)


def test_header_and_row_order(tmp_path):
    img = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    write_pfm(tmp_path / "b.pfm", img)
    raw = (tmp_path / "b.pfm").read_bytes()
    assert raw.startswith(b"Pf\n3 2\n-1.0\n")
    body = np.frombuffer(raw[len(b"Pf\n3 2\n-1.0\n"):], "<f4")
    assert body.tolist() == [4, 5, 6, 1, 2, 3]  # bottom row first


def test_reads_big_endian(tmp_path):
    img = np.arange(6.0).reshape(2, 3)
    (tmp_path / "c.pfm").write_bytes(b"Pf\n3 2\n1.0\n" + np.flipud(img).astype(">f4").tobytes())
    assert np.array_equal(read_pfm(tmp_path / "c.pfm"), img)


def test_rejects_bad_input(tmp_path):
    with pytest.raises(PfmError):
        write_pfm(tmp_path / "d.pfm", np.zeros((2, 2, 2)))
    with pytest.raises(PfmError):
        write_pfm(tmp_path / "d.pfm", np.array([[np.nan]]))
    (tmp_path / "e.pfm").write_bytes(b"PF\n1 1\n-1.0\n" + b"\0" * 12)
    with pytest.raises(PfmError):
        read_pfm(tmp_path / "e.pfm")
    (tmp_path / "f.pfm").write_bytes(b"Pf\n2 2\n-1.0\n" + b"\0" * 12)
    with pytest.raises(PfmError, match="expected 16"):
        read_pfm(tmp_path / "f.pfm")
    (tmp_path / "g.pfm").write_bytes(b"hello")
    with pytest.raises(PfmError):
        read_pfm(tmp_path / "g.pfm")
