"""Binary PGM (P5) image I/O, plus optional PNG via Pillow.

Label images are written as PGM with ids scaled to distinguishable gray
levels and a sidecar CSV carrying the raw ids.
"""

from __future__ import annotations

import csv
import os

import numpy as np

__all__ = ["read_pgm", "write_pgm", "read_image", "write_label_image",
           "read_label_image", "read_mask", "write_mask"]


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary (P5) PGM file into a (height, width) array."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    i = 0
    while len(tokens) < 4 and i < len(data):
        # skip whitespace and comment lines
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if i < len(data) and data[i:i + 1] == b"#":
            while i < len(data) and data[i] != 0x0A:
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        tokens.append(data[i:j])
        i = j
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise ValueError(f"{path}: not a binary P5 PGM file")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval <= 0 or maxval > 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    i += 1  # single whitespace byte after the header
    raster = data[i:i + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: truncated raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path, img: np.ndarray):
    """Write a (height, width) uint8 array as binary P5 PGM."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError("expected a 2-D image")
    arr = arr.astype(np.uint8)
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


def read_image(path) -> np.ndarray:
    """Read a grayscale image, dispatching on extension (.pgm or .png)."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".pgm":
        return read_pgm(path)
    if ext == ".png":
        try:
            from PIL import Image
        except ImportError as exc:
            raise RuntimeError("PNG support requires Pillow "
                               "(pip install neutroclust[png])") from exc
        with Image.open(path) as im:
            return np.asarray(im.convert("L"), dtype=np.uint8)
    raise ValueError(f"unsupported image format: {path}")


def write_label_image(path, labels: np.ndarray):
    """Write a label image as PGM with ids spread over 0..255, plus a
    sidecar ``<path>.labels.csv`` holding the raw integer ids."""
    lab = np.asarray(labels, dtype=np.int64)
    if lab.ndim != 2:
        raise ValueError("expected a 2-D label image")
    top = int(lab.max())
    if top == 0:
        gray = np.zeros_like(lab, dtype=np.uint8)
    else:
        gray = np.rint(lab * (255.0 / top)).astype(np.uint8)
    write_pgm(path, gray)
    sidecar = str(path) + ".labels.csv"
    with open(sidecar, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "label"])
        for r in range(lab.shape[0]):
            for c in range(lab.shape[1]):
                writer.writerow([r, c, int(lab[r, c])])


def read_label_image(path) -> np.ndarray:
    """Recover integer class ids from a gray-coded label PGM.

    Distinct gray levels are mapped to 0..c-1 in ascending order, which
    inverts :func:`write_label_image` (the scaling there is monotone).
    """
    gray = read_pgm(path)
    levels = np.unique(gray)
    lut = {int(v): i for i, v in enumerate(levels)}
    out = np.empty(gray.shape, dtype=np.int64)
    for v, i in lut.items():
        out[gray == v] = i
    return out


def read_mask(path) -> np.ndarray:
    """Read a binary mask PGM: 0 is background, anything above is foreground."""
    return read_pgm(path) > 127


def write_mask(path, mask: np.ndarray):
    write_pgm(path, np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8))
