"""
Tests for feature files.
"""

import struct

import numpy as np
import pytest

from hfr_aligner.exceptions import ArchiveIOError, FormatError
from hfr_aligner.features.io import read_features, write_features
from hfr_aligner.numerics.archive import write_archive


def test_round_trip_is_bit_exact(tmp_path, make_seq):
    seq = make_seq(3)
    path = tmp_path / "feats.f16t"
    write_features(path, seq)
    loaded = read_features(path)

    assert len(loaded) == 3
    for a, b in zip(seq, loaded):
        assert a.z.tobytes() == b.z.tobytes()
        assert a.frame_index == b.frame_index
        assert a.timestamp_s == b.timestamp_s


def test_rewrite_is_byte_identical(tmp_path, make_seq):
    seq = make_seq(5)
    write_features(tmp_path / "a.f16t", seq)
    write_features(tmp_path / "b.f16t", read_features(tmp_path / "a.f16t"))
    assert (tmp_path / "a.f16t").read_bytes() == (tmp_path / "b.f16t").read_bytes()


def test_empty_sequence(tmp_path):
    with pytest.raises(FormatError):
        write_features(tmp_path / "empty.f16t", [])


def test_version_two_file(tmp_path, make_seq):
    path = tmp_path / "v2.f16t"
    write_features(path, make_seq(1))
    data = bytearray(path.read_bytes())
    name_len = struct.unpack("<I", data[:4])[0]
    offset = 4 + name_len + 4
    data[offset : offset + 4] = struct.pack("<I", 2)
    path.write_bytes(bytes(data))
    with pytest.raises(FormatError, match="expected version 1"):
        read_features(path)


def test_truncated_file(tmp_path, make_seq):
    path = tmp_path / "cut.f16t"
    write_features(path, make_seq(2))
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(ArchiveIOError):
        read_features(path)


def test_missing_meta(tmp_path):
    path = tmp_path / "nometa.f16t"
    write_archive(path, {"frame/0/z": np.zeros((4, 2), dtype=np.float32)})
    with pytest.raises(FormatError, match="frame/0/meta"):
        read_features(path)


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_non_finite_features_are_rejected(tmp_path, bad):
    z = np.zeros((4, 2), dtype=np.float32)
    z[1, 1] = bad
    path = tmp_path / "bad.f16t"
    write_archive(path, {"frame/0/z": z, "frame/0/meta": np.array([0.0, 0.0], dtype=np.float32)})
    with pytest.raises(FormatError, match="non-finite"):
        read_features(path)
