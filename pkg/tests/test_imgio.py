import numpy as np
import pytest

from patchorder.imgio import read_image, read_pgm, read_png, write_image, write_pgm, write_png


def test_pgm_8bit_round_trip(tmp_path, rng):
    img = rng.random((5, 7))
    path = tmp_path / "a.pgm"
    write_pgm(path, img, bits=8)
    back = read_pgm(path)
    assert back.shape == img.shape
    assert np.abs(back - img).max() <= 0.5 / 255 + 1e-12


def test_pgm_16bit_is_big_endian(tmp_path):
    img = np.array([[1.0, 0.0]])
    path = tmp_path / "b.pgm"
    write_pgm(path, img, bits=16)
    raw = path.read_bytes()
    header, raster = raw.split(b"65535\n", 1)
    assert header.startswith(b"P5")
    assert raster == b"\xff\xff\x00\x00"
    assert np.array_equal(read_pgm(path), img)


def test_pgm_header_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n2 2\n# another\n255\n" + bytes([0, 128, 255, 64]))
    img = read_pgm(path)
    assert img.shape == (2, 2)
    assert img[0, 0] == 0.0 and img[1, 0] == pytest.approx(255 / 255)
    assert img[0, 1] == pytest.approx(128 / 255)


def test_pgm_rejects_garbage(tmp_path):
    path = tmp_path / "d.pgm"
    path.write_bytes(b"P6\n1 1\n255\n\x00")
    with pytest.raises(ValueError):
        read_pgm(path)
    path.write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(ValueError):
        read_pgm(path)


def test_png_round_trips(tmp_path, rng):
    img = rng.random((6, 4))
    p8 = tmp_path / "e.png"
    write_png(p8, img, bits=8)
    assert np.abs(read_png(p8) - img).max() <= 0.5 / 255 + 1e-12
    p16 = tmp_path / "f.png"
    write_png(p16, img, bits=16)
    assert np.abs(read_png(p16) - img).max() <= 0.5 / 65535 + 1e-12


def test_write_clips_out_of_range(tmp_path):
    img = np.array([[-0.5, 0.25], [1.5, 1.0]])
    path = tmp_path / "g.pgm"
    write_pgm(path, img)
    back = read_pgm(path)
    assert back[0, 0] == 0.0 and back[1, 0] == 1.0


def test_read_image_dispatches_on_content(tmp_path, rng):
    img = rng.random((3, 3))
    pgm = tmp_path / "h.weird"
    write_pgm(pgm, img)
    assert read_image(pgm).shape == (3, 3)
    png = tmp_path / "i.png"
    write_image(png, img)
    assert read_image(png).shape == (3, 3)
    with pytest.raises(ValueError):
        write_image(tmp_path / "j.bmp", img)
