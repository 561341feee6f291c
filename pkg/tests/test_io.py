import json

import numpy as np
import pytest
from jsonschema import ValidationError

from kmask import io
from kmask.mask_gen import custom_mask, equispaced_mask, offset_mask_irregular, random_mask, shift_mask
from kmask.phantom import PhantomSpec


@pytest.mark.parametrize(
    "mask",
    [
        equispaced_mask(12, 4, 1),
        equispaced_mask(13, 4, 1),
        offset_mask_irregular(13, 4, 1, 2),
        random_mask(64, 4, seed=7, center=16),
        shift_mask(equispaced_mask(12, 4, 0)),
        custom_mask([1, 0, 1]),
    ],
)
def test_mask_json_round_trip(tmp_path, mask):
    path = tmp_path / "m.json"
    io.write_mask_json(path, mask)
    back = io.read_mask_json(path)
    assert back == mask
    assert back.misaligned == mask.misaligned
    io.validate(json.loads(path.read_text()), "mask")


def test_mask_json_fields(tmp_path):
    io.write_mask_json(tmp_path / "m.json", offset_mask_irregular(13, 4, 1, 2))
    data = json.loads((tmp_path / "m.json").read_text())
    assert data["version"] == 1
    assert data["kind"] == "irregular"
    assert (data["offset_pos"], data["offset_neg"], data["seed"]) == (1, 2, None)
    assert data["bits"] == [0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0]


def test_mask_json_rejects_bad_input():
    bad = io.mask_to_dict(equispaced_mask(12, 4, 1))
    bad["bits"] = [0, 2]
    with pytest.raises(ValidationError):
        io.mask_from_dict(bad)
    bad = io.mask_to_dict(equispaced_mask(12, 4, 1))
    bad["bits"] = bad["bits"][:-1]
    with pytest.raises(ValueError):
        io.mask_from_dict(bad)


def test_mask_csv_round_trip(tmp_path):
    mask = equispaced_mask(12, 4, 1)
    io.write_mask_csv(tmp_path / "m.csv", mask)
    assert (tmp_path / "m.csv").read_text() == "0,1,0,0,0,1,0,0,0,1,0,0\n"
    np.testing.assert_array_equal(io.read_mask_csv(tmp_path / "m.csv"), mask.bits)
    (tmp_path / "bad.csv").write_text("0,1,x\n")
    with pytest.raises(ValueError):
        io.read_mask_csv(tmp_path / "bad.csv")


@pytest.mark.parametrize("shape", [(1,), (7,), (3, 5)])
def test_complex_round_trip(tmp_path, rng, shape):
    x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    side = io.write_complex(tmp_path / "x.bin", x)
    assert json.loads(side.read_text()) == {"version": 1, "shape": list(shape)}
    np.testing.assert_array_equal(io.read_complex(tmp_path / "x.bin"), x)


def test_complex_byte_layout(tmp_path):
    io.write_complex(tmp_path / "x.bin", np.array([1 + 2j, -0.5j]))
    raw = (tmp_path / "x.bin").read_bytes()
    np.testing.assert_array_equal(np.frombuffer(raw, dtype="<f8"), [1, 2, 0, -0.5])


def test_complex_size_mismatch(tmp_path):
    io.write_complex(tmp_path / "x.bin", np.ones(4))
    (tmp_path / "x.bin").write_bytes(b"\0" * 8)
    with pytest.raises(ValueError):
        io.read_complex(tmp_path / "x.bin")


def test_pgm(tmp_path):
    img = np.array([[0.0, 1.0], [2.0, 4.0]])
    side = io.write_pgm(tmp_path / "a.pgm", img)
    data = (tmp_path / "a.pgm").read_bytes()
    assert data.startswith(b"P5\n2 2\n255\n")
    np.testing.assert_array_equal(io.read_pgm(tmp_path / "a.pgm"), [[0, 64], [128, 255]])
    meta = json.loads(side.read_text())
    assert (meta["min"], meta["max"], meta["shape"]) == (0.0, 4.0, [2, 2])


def test_pgm_constant_and_strip(tmp_path):
    io.write_pgm(tmp_path / "c.pgm", np.full((2, 3), 5.0))
    np.testing.assert_array_equal(io.read_pgm(tmp_path / "c.pgm"), 0)
    io.write_pgm(tmp_path / "s.pgm", np.arange(4.0), strip_height=3)
    px = io.read_pgm(tmp_path / "s.pgm")
    assert px.shape == (3, 4)
    np.testing.assert_array_equal(px[0], [0, 85, 170, 255])


def test_dumps_seventeen_digits():
    text = io.dumps({"a": 0.1, "b": 1.0, "c": [1, 2.5e-300], "d": None, "e": True})
    data = json.loads(text)
    assert data == {"a": 0.1, "b": 1.0, "c": [1, 2.5e-300], "d": None, "e": True}
    assert "0.10000000000000001" in text
    assert '"b": 1.0' in text
    with pytest.raises(ValueError):
        io.dumps({"x": float("nan")})


def test_dumps_numpy_scalars():
    assert json.loads(io.dumps([np.int64(3), np.float64(0.5), np.bool_(True)])) == [3, 0.5, True]


def test_phantom_spec_schema():
    io.validate(PhantomSpec(n=8).to_dict(), "phantom_spec")
