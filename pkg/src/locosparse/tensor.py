"""Dense float64 tensors with a fixed binary layout, plus PGM ingestion.

The on-disk layout (magic `SCT1`) is: four magic bytes, one unsigned
rank byte, `rank` little-endian uint64 extents, then the payload as
little-endian float64 in row-major order. Round trips are bit exact.
"""

import math
import struct

import numpy as np

from .errors import FormatError, StorageError, ValidationError

_MAGIC = b"SCT1"
_MAX_RANK = 4
_WHITESPACE = (0x20, 0x09, 0x0A, 0x0D, 0x0B, 0x0C)


def as_tensor(data):
    """Coerce to a contiguous float64 array obeying the layout rules."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim > _MAX_RANK:
        raise ValidationError(f"rank {arr.ndim} exceeds the maximum of {_MAX_RANK}")
    if any(e < 1 for e in arr.shape):
        raise ValidationError(f"zero-length extent in shape {arr.shape}")
    return arr


def save_tensor(t, path):
    """Write a tensor in the SCT1 layout."""
    arr = as_tensor(t)
    header = _MAGIC + struct.pack("<B", arr.ndim)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(arr.astype("<f8", copy=False).tobytes())
    except OSError as exc:
        raise StorageError(f"cannot write tensor to {path}: {exc}") from exc


def load_tensor(path):
    """Read a tensor written by save_tensor; the exact inverse."""
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise StorageError(f"cannot read tensor from {path}: {exc}") from exc
    if len(buf) < 5 or buf[:4] != _MAGIC:
        raise FormatError(f"{path}: not an SCT1 tensor (bad magic)")
    rank = buf[4]
    if rank > _MAX_RANK:
        raise FormatError(f"{path}: rank {rank} exceeds the maximum of {_MAX_RANK}")
    offset = 5 + 8 * rank
    if len(buf) < offset:
        raise FormatError(f"{path}: truncated extent table")
    dims = struct.unpack_from(f"<{rank}Q", buf, 5)
    if any(d < 1 for d in dims):
        raise FormatError(f"{path}: zero-length extent in {dims}")
    expected = 8 * math.prod(dims)
    actual = len(buf) - offset
    if actual != expected:
        raise FormatError(f"{path}: payload holds {actual} bytes, expected {expected}")
    data = np.frombuffer(buf, dtype="<f8", offset=offset)
    if not np.all(np.isfinite(data)):
        raise ValidationError(f"{path}: payload contains non-finite values")
    return np.array(data, dtype=np.float64).reshape(dims)


def read_pgm(path):
    """Read an 8-bit binary PGM (P5) image, scaled to [0, 1]."""
    try:
        with open(path, "rb") as fh:
            buf = fh.read()
    except OSError as exc:
        raise StorageError(f"cannot read image from {path}: {exc}") from exc
    pos = 0

    def token():
        nonlocal pos
        while pos < len(buf):
            c = buf[pos]
            if c == 0x23:  # '#' comment runs to the end of the line
                while pos < len(buf) and buf[pos] not in (0x0A, 0x0D):
                    pos += 1
            elif c in _WHITESPACE:
                pos += 1
            else:
                start = pos
                while pos < len(buf) and buf[pos] not in _WHITESPACE and buf[pos] != 0x23:
                    pos += 1
                return buf[start:pos]
        raise FormatError(f"{path}: truncated PGM header")

    if token() != b"P5":
        raise FormatError(f"{path}: not a binary PGM (P5) file")
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if width < 1 or height < 1:
        raise FormatError(f"{path}: bad PGM dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise FormatError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    pos += 1  # exactly one whitespace byte separates maxval from the raster
    need = width * height
    raster = buf[pos:pos + need]
    if len(raster) != need:
        raise FormatError(f"{path}: raster holds {len(raster)} bytes, expected {need}")
    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return img.astype(np.float64) / maxval


def load_image_stack(path):
    """Load grayscale image data from SCT or PGM, sniffing the magic bytes."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(2)
    except OSError as exc:
        raise StorageError(f"cannot read image from {path}: {exc}") from exc
    if head == b"P5":
        return read_pgm(path)
    return load_tensor(path)
