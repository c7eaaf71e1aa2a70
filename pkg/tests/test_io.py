"""File format parsing, serialization, and error reporting."""

import numpy as np
import pytest

from sortclust.errors import DataFormatError
from sortclust.io import (
    load_dense_csv,
    load_fingerprints,
    load_labels,
    save_fingerprints,
    save_labels,
)
from sortclust.synth import SynthSpec, generate


class TestFingerprintFormat:
    def test_bit_lines(self, tmp_path):
        path = tmp_path / "fps.txt"
        path.write_text("101\n011\n")
        fps = load_fingerprints(path)
        assert (fps.n, fps.d) == (2, 3)
        assert fps.scores.tolist() == [2, 2]

    def test_dimension_mismatch_names_line(self, tmp_path):
        path = tmp_path / "fps.txt"
        path.write_text("101\n01\n")
        with pytest.raises(DataFormatError, match="line 2"):
            load_fingerprints(path)

    def test_bad_character_names_line(self, tmp_path):
        path = tmp_path / "fps.txt"
        path.write_text("101\n1x1\n")
        with pytest.raises(DataFormatError, match="line 2"):
            load_fingerprints(path)

    def test_hex_requires_dims(self, tmp_path):
        path = tmp_path / "fps.txt"
        path.write_text("0x5\n")
        with pytest.raises(DataFormatError, match="dimension"):
            load_fingerprints(path)

    def test_hex_matches_bits(self, tmp_path):
        # 0x5 over 4 bits is the bit-string 0101
        path = tmp_path / "fps.txt"
        path.write_text("0x5\n0xf\n")
        fps = load_fingerprints(path, dims=4)
        assert fps.to_bool_matrix().astype(int).tolist() == [
            [0, 1, 0, 1],
            [1, 1, 1, 1],
        ]

    def test_hex_value_too_wide(self, tmp_path):
        path = tmp_path / "fps.txt"
        path.write_text("0x1f\n")
        with pytest.raises(DataFormatError, match="line 1"):
            load_fingerprints(path, dims=4)

    def test_mixed_formats_rejected(self, tmp_path):
        path = tmp_path / "fps.txt"
        path.write_text("101\n0x5\n")
        with pytest.raises(DataFormatError, match="line 2"):
            load_fingerprints(path)

    @pytest.mark.parametrize("fmt", ["bits", "hex"])
    def test_roundtrip(self, tmp_path, fmt):
        fps, _ = generate(SynthSpec(num_clusters=3, k=5, d=37, rng_seed=9))
        path = tmp_path / "fps.txt"
        save_fingerprints(path, fps, fmt=fmt)
        loaded = load_fingerprints(path, dims=37 if fmt == "hex" else None)
        assert np.array_equal(loaded.bits, fps.bits)
        assert np.array_equal(loaded.scores, fps.scores)
        # load -> save -> load is the identity
        path2 = tmp_path / "fps2.txt"
        save_fingerprints(path2, loaded, fmt=fmt)
        assert path.read_text() == path2.read_text()


class TestDenseFormat:
    def test_basic(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("1.0,2.0\n-3.5,0.0\n")
        ds = load_dense_csv(path)
        assert ds.points.tolist() == [[1.0, 2.0], [-3.5, 0.0]]

    def test_header_skipped_on_request(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("x,y\n1.0,2.0\n")
        ds = load_dense_csv(path, skip_header=True)
        assert ds.points.tolist() == [[1.0, 2.0]]

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("1.0,2.0\n1.0,zzz\n")
        with pytest.raises(DataFormatError, match="line 2"):
            load_dense_csv(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(DataFormatError, match="line 2"):
            load_dense_csv(path)


class TestLabels:
    def test_roundtrip(self, tmp_path):
        labels = np.array([0, 2, 1, 1, 0])
        path = tmp_path / "labels.csv"
        save_labels(path, labels)
        assert path.read_text().splitlines()[0] == "index,label"
        assert np.array_equal(load_labels(path), labels)

    def test_headerless_accepted(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("0,1\n1,0\n")
        assert load_labels(path).tolist() == [1, 0]

    def test_missing_index_rejected(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("index,label\n0,1\n2,0\n")
        with pytest.raises(DataFormatError):
            load_labels(path)
