"""Run manifests: the invoked command, resolved config, and input digests."""

from .errors import StorageError

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1


def fnv1a64(data):
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK
    return h


def digest_file(path):
    """fnv1a64 of a file's contents."""
    try:
        with open(path, "rb") as fh:
            return fnv1a64(fh.read())
    except OSError as exc:
        raise StorageError(f"cannot digest {path}: {exc}") from exc


def write_manifest(path, command, config, inputs, outputs, duration_seconds):
    """Write a key=value manifest; every input path gets its digest."""
    lines = [f"command={command}"]
    for key in sorted(config):
        lines.append(f"config.{key}={config[key]}")
    for input_path in inputs:
        lines.append(f"input={input_path} fnv1a64={digest_file(input_path):016x}")
    for output_path in outputs:
        lines.append(f"output={output_path}")
    lines.append(f"duration_seconds={duration_seconds:.3f}")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise StorageError(f"cannot write manifest to {path}: {exc}") from exc


def read_manifest(path):
    """Parse a manifest back into (command, config, inputs, outputs, duration).

    inputs come back as (path, digest) pairs so callers can re-verify
    them against the files on disk.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise StorageError(f"cannot read manifest from {path}: {exc}") from exc
    command = None
    config = {}
    inputs = []
    outputs = []
    duration = None
    for line in lines:
        key, _, value = line.partition("=")
        if key == "command":
            command = value
        elif key.startswith("config."):
            config[key[len("config."):]] = value
        elif key == "input":
            file_path, _, digest = value.rpartition(" fnv1a64=")
            inputs.append((file_path, int(digest, 16)))
        elif key == "output":
            outputs.append(value)
        elif key == "duration_seconds":
            duration = float(value)
    return command, config, inputs, outputs, duration
