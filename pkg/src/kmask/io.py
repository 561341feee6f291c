"""File formats: raw complex binary + sidecar, mask JSON/CSV, PGM rasters, JSON reports."""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from kmask.mask_gen import MaskSpec, SamplingMask

__all__ = [
    "FORMAT_VERSION",
    "dumps",
    "load_schema",
    "mask_from_dict",
    "mask_to_dict",
    "read_complex",
    "read_mask_csv",
    "read_mask_json",
    "read_pgm",
    "render_pgm",
    "sidecar_path",
    "validate",
    "write_complex",
    "write_json",
    "write_mask_csv",
    "write_mask_json",
    "write_pgm",
]

FORMAT_VERSION = 1
_COMPLEX_DTYPE = np.dtype("<f8")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("kmask").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(instance, name: str):
    """Raise ``jsonschema.ValidationError`` if ``instance`` breaks schema ``name``."""
    jsonschema.validate(instance, load_schema(name))


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            raise ValueError(f"cannot serialise non-finite value {value}")
        text = format(value, ".17g")
        if "e" not in text and "." not in text:
            text += ".0"
        return text
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj, schema: str | None = None):
    if schema is not None:
        validate(json.loads(dumps(obj)), schema)
    Path(path).write_text(dumps(obj))


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_complex(path, data, extra: dict | None = None) -> Path:
    """Write little-endian float64 interleaved re/im samples plus a JSON sidecar.

    Returns the sidecar path.
    """
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim not in (1, 2) or arr.size == 0:
        raise ValueError(f"expected a non-empty 1D or 2D array, got shape {arr.shape}")
    interleaved = np.empty(arr.shape + (2,), dtype=_COMPLEX_DTYPE)
    interleaved[..., 0] = arr.real
    interleaved[..., 1] = arr.imag
    Path(path).write_bytes(interleaved.tobytes(order="C"))
    meta = {"version": FORMAT_VERSION, "shape": list(arr.shape)}
    if extra:
        meta.update(extra)
    side = sidecar_path(path)
    write_json(side, meta, schema="complex_sidecar")
    return side


def read_complex(path) -> np.ndarray:
    meta = json.loads(sidecar_path(path).read_text())
    validate(meta, "complex_sidecar")
    shape = tuple(meta["shape"])
    raw = np.frombuffer(Path(path).read_bytes(), dtype=_COMPLEX_DTYPE)
    expected = 2 * int(np.prod(shape))
    if raw.size != expected:
        raise ValueError(f"{path}: expected {expected} float64 values for shape {shape}, found {raw.size}")
    pairs = raw.reshape(shape + (2,))
    return pairs[..., 0] + 1j * pairs[..., 1]


def mask_to_dict(mask: SamplingMask) -> dict:
    spec = mask.spec
    return {
        "version": FORMAT_VERSION,
        "n": mask.n,
        "acceleration": spec.acceleration,
        "kind": spec.kind,
        "offset_pos": spec.offset_pos,
        "offset_neg": spec.offset_neg,
        "seed": spec.seed,
        "center_lines": spec.center_lines,
        "layout": mask.layout,
        "bits": [int(b) for b in mask.bits],
    }


def mask_from_dict(data: dict) -> SamplingMask:
    validate(data, "mask")
    spec = MaskSpec(
        width=data["n"],
        acceleration=data["acceleration"],
        kind=data["kind"],
        offset_pos=data["offset_pos"],
        offset_neg=data["offset_neg"],
        seed=data["seed"],
        center_lines=data["center_lines"],
    )
    bits = np.array(data["bits"], dtype=bool)
    misaligned = spec.kind == "equispaced" and spec.width % spec.acceleration != 0
    return SamplingMask(bits, data["layout"], spec, misaligned=misaligned)


def write_mask_json(path, mask: SamplingMask):
    write_json(path, mask_to_dict(mask), schema="mask")


def read_mask_json(path) -> SamplingMask:
    return mask_from_dict(json.loads(Path(path).read_text()))


def write_mask_csv(path, mask: SamplingMask):
    Path(path).write_text(",".join(str(int(b)) for b in mask.bits) + "\n")


def read_mask_csv(path) -> np.ndarray:
    text = Path(path).read_text().replace("\n", ",")
    values = [v.strip() for v in text.split(",") if v.strip()]
    if any(v not in ("0", "1") for v in values):
        raise ValueError(f"{path}: mask CSV may only contain 0 and 1")
    return np.array([v == "1" for v in values], dtype=bool)


def render_pgm(image) -> tuple[bytes, float, float]:
    """Min-max normalise a real 2D array to 8-bit binary PGM (P5).

    A constant image maps to all zeros. Returns ``(payload, lo, hi)``.
    """
    img = np.asarray(image, dtype=float)
    if img.ndim == 1:
        img = img[None, :]
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected a non-empty 2D array, got shape {img.shape}")
    lo, hi = float(img.min()), float(img.max())
    if hi > lo:
        scaled = np.rint((img - lo) / (hi - lo) * 255)
    else:
        scaled = np.zeros_like(img)
    pixels = np.clip(scaled, 0, 255).astype(np.uint8)
    h, w = pixels.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return header + pixels.tobytes(), lo, hi


def write_pgm(path, image, strip_height: int = 1) -> Path:
    """Write a PGM rendering and a sidecar recording the normalisation bounds.

    1D inputs are drawn as a strip repeated over ``strip_height`` rows.
    """
    img = np.asarray(image, dtype=float)
    if img.ndim == 1:
        img = np.tile(img, (max(1, strip_height), 1))
    payload, lo, hi = render_pgm(img)
    Path(path).write_bytes(payload)
    side = sidecar_path(path)
    write_json(
        side,
        {"version": FORMAT_VERSION, "shape": list(img.shape), "min": lo, "max": hi},
        schema="pgm_sidecar",
    )
    return side


def read_pgm(path) -> np.ndarray:
    """Read back an 8-bit binary PGM written by :func:`write_pgm`."""
    data = Path(path).read_bytes()
    tokens = data.split(maxsplit=4)
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM is supported")
    return np.frombuffer(tokens[4][: w * h], dtype=np.uint8).reshape(h, w)
