import numpy as np
import pytest
from hypothesis import given, strategies as st

from freqgen.exceptions import (
    DecodeError,
    InvalidInputError,
    UnsupportedFormatError,
)
from freqgen.raster import dequantize, quantize, read_image, rgb2gray, write_image


class TestRgb2Gray:
    def test_all_white(self):
        img = np.ones((4, 4, 3))
        assert np.allclose(rgb2gray(img), 1.0)

    def test_equal_channels(self):
        img = np.full((3, 5, 3), 0.37)
        assert np.allclose(rgb2gray(img), 0.37)

    def test_pure_red(self):
        img = np.zeros((2, 2, 3))
        img[:, :, 0] = 1.0
        assert np.allclose(rgb2gray(img), 0.299)

    def test_rejects_gray_input(self):
        with pytest.raises(InvalidInputError):
            rgb2gray(np.zeros((4, 4, 1)))

    @given(st.floats(min_value=0.0, max_value=1.0))
    def test_linear_in_scale(self, a):
        rng = np.random.default_rng(0)
        x = rng.uniform(0, 1, (6, 6, 3))
        assert np.allclose(rgb2gray(a * x), a * rgb2gray(x), atol=1e-12)


class TestCodecRoundtrip:
    @pytest.mark.parametrize("ext", ["png", "ppm"])
    def test_color_roundtrip_bit_identical(self, tmp_path, ext):
        rng = np.random.default_rng(1)
        img = dequantize(rng.integers(0, 256, size=(13, 9, 3), dtype=np.uint8))
        path = tmp_path / f"img.{ext}"
        write_image(img, str(path))
        back = read_image(str(path))
        assert np.array_equal(back, img)

    @pytest.mark.parametrize("ext", ["png", "pgm"])
    def test_gray_roundtrip(self, tmp_path, ext):
        rng = np.random.default_rng(2)
        img = dequantize(rng.integers(0, 256, size=(7, 11, 1), dtype=np.uint8))
        path = tmp_path / f"img.{ext}"
        write_image(img, str(path))
        assert np.array_equal(read_image(str(path)), img)

    def test_1x1_black(self, tmp_path):
        path = tmp_path / "b.png"
        write_image(np.zeros((1, 1, 1)), str(path))
        assert np.array_equal(read_image(str(path)), np.zeros((1, 1, 1)))

    def test_2x2_ramp_ppm(self, tmp_path):
        ramp = dequantize(
            np.arange(12, dtype=np.uint8).reshape(2, 2, 3) * 20
        )
        path = tmp_path / "ramp.ppm"
        write_image(ramp, str(path))
        assert np.array_equal(read_image(str(path)), ramp)

    def test_quantization_rule(self):
        assert quantize(np.array([[[0.0, 0.5, 1.0]]])).tolist() == [[[0, 128, 255]]]


class TestCodecErrors:
    def test_decode_failure(self, tmp_path):
        path = tmp_path / "junk.png"
        path.write_bytes(b"this is not a png")
        with pytest.raises(DecodeError):
            read_image(str(path))

    def test_pnm_bad_magic(self, tmp_path):
        path = tmp_path / "junk.ppm"
        path.write_bytes(b"P9\n2 2\n255\n" + bytes(12))
        with pytest.raises(DecodeError):
            read_image(str(path))

    def test_pnm_truncated(self, tmp_path):
        path = tmp_path / "short.ppm"
        path.write_bytes(b"P6\n4 4\n255\n" + bytes(5))
        with pytest.raises(DecodeError):
            read_image(str(path))

    def test_unsupported_bit_depth(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
        with pytest.raises(UnsupportedFormatError):
            read_image(str(path))

    def test_unsupported_extension(self, tmp_path):
        with pytest.raises(UnsupportedFormatError):
            write_image(np.zeros((2, 2, 3)), str(tmp_path / "img.jpg"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_image(str(tmp_path / "nope.png"))

    def test_out_of_range_write(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_image(np.full((2, 2, 3), 1.5), str(tmp_path / "x.png"))


def test_pnm_header_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n2 2\n255\n" + bytes([1, 2, 3, 4]))
    img = read_image(str(path))
    assert np.array_equal(quantize(img)[:, :, 0], [[1, 2], [3, 4]])
