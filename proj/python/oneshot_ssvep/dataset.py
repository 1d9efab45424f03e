"""Reader/writer for the toolkit's dataset layout: manifest.json plus one
binary tensor per subject (24-byte header "SSVP", u32 version, four u32 dims,
then little-endian f32 values over [block][stimulus][channel][sample]).
Dataset converters target this module."""

from __future__ import annotations

import json
import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"SSVP"
FORMAT_VERSION = 1


def write_tensor(path: os.PathLike, array: np.ndarray) -> None:
    a = np.ascontiguousarray(array, dtype="<f4")
    if a.ndim != 4:
        raise ValueError("tensor must have 4 dims [block, stimulus, channel, sample]")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<5I", FORMAT_VERSION, *a.shape))
        f.write(a.tobytes())
    os.replace(tmp, path)


def read_tensor(path: os.PathLike) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 24 or raw[:4] != MAGIC:
        raise ValueError(f"{path}: not a tensor file")
    version, *dims = struct.unpack("<5I", raw[4:24])
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    count = int(np.prod(dims))
    if len(raw) != 24 + 4 * count:
        raise ValueError(f"{path}: size does not match header")
    return np.frombuffer(raw, dtype="<f4", offset=24).reshape(dims)


def write_dataset(directory: os.PathLike, manifest: dict, tensors: dict[str, np.ndarray]) -> None:
    """`tensors` maps subject id to its [block, stimulus, channel, sample] array."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for subject in manifest["subjects"]:
        write_tensor(directory / subject["file"], tensors[subject["id"]])
    m = dict(manifest)
    m.setdefault("format_version", FORMAT_VERSION)
    tmp = directory / "manifest.json.tmp"
    tmp.write_text(json.dumps(m, indent=2) + "\n")
    os.replace(tmp, directory / "manifest.json")


def read_dataset(directory: os.PathLike) -> tuple[dict, dict[str, np.ndarray]]:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    tensors = {s["id"]: read_tensor(directory / s["file"]) for s in manifest["subjects"]}
    return manifest, tensors
