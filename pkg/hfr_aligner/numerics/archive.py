"""
Binary tensor container and named archive.

Container layout (all little-endian):

    b"F16T" | version u32 (=1) | rank u32 | dims rank x u32 | payload float32 row-major

A named archive is a sequence of records ``name_len u32 | utf-8 name | container``.
"""

import io
import logging
import struct
from pathlib import Path
from typing import BinaryIO, Dict, Mapping, Union

import numpy as np

from hfr_aligner.exceptions import ArchiveIOError, FormatError
from hfr_aligner.numerics.tensor import MAX_RANK, Tensor

logger = logging.getLogger(__name__)

MAGIC = b"F16T"
VERSION = 1
_U32 = struct.Struct("<I")
_PAYLOAD_DTYPE = np.dtype("<f4")

PathLike = Union[str, Path]


def _read_exact(stream: BinaryIO, size: int, source: str, what: str) -> bytes:
    data = stream.read(size)
    if len(data) != size:
        raise ArchiveIOError(source, f"truncated {what}: expected {size} bytes, got {len(data)}")
    return data


def _read_u32(stream: BinaryIO, source: str, what: str) -> int:
    return int(_U32.unpack(_read_exact(stream, 4, source, what))[0])


def encode_tensor(tensor: Tensor) -> bytes:
    """Serialize one tensor into a container (64-bit input is stored as float32)."""
    arr = np.asarray(tensor)
    if not 1 <= arr.ndim <= MAX_RANK:
        raise FormatError("<tensor>", f"rank {arr.ndim} outside 1-{MAX_RANK}")
    header = MAGIC + _U32.pack(VERSION) + _U32.pack(arr.ndim)
    header += b"".join(_U32.pack(int(d)) for d in arr.shape)
    return header + np.ascontiguousarray(arr, dtype=_PAYLOAD_DTYPE).tobytes()


def read_tensor(stream: BinaryIO, source: str = "<stream>") -> Tensor:
    """Read one tensor container from a stream.

    Raises:
        FormatError: On bad magic, version or rank
        ArchiveIOError: On a truncated header or payload
    """
    magic = _read_exact(stream, 4, source, "magic")
    if magic != MAGIC:
        raise FormatError(source, f"bad magic {magic!r}, expected {MAGIC!r}")
    version = _read_u32(stream, source, "version")
    if version != VERSION:
        raise FormatError(source, f"unsupported version {version}, expected version {VERSION}")
    rank = _read_u32(stream, source, "rank")
    if not 1 <= rank <= MAX_RANK:
        raise FormatError(source, f"rank {rank} outside 1-{MAX_RANK}")
    dims = tuple(_read_u32(stream, source, "dims") for _ in range(rank))
    count = int(np.prod(dims))
    payload = _read_exact(stream, count * _PAYLOAD_DTYPE.itemsize, source, "payload")
    return np.frombuffer(payload, dtype=_PAYLOAD_DTYPE).astype(np.float32).reshape(dims)


def encode_archive(records: Mapping[str, Tensor]) -> bytes:
    buf = io.BytesIO()
    for name, tensor in records.items():
        raw = name.encode("utf-8")
        buf.write(_U32.pack(len(raw)))
        buf.write(raw)
        buf.write(encode_tensor(tensor))
    return buf.getvalue()


def decode_archive(data: bytes, source: str = "<bytes>") -> Dict[str, Tensor]:
    """Parse a named archive held in memory, preserving record order."""
    stream = io.BytesIO(data)
    records: Dict[str, Tensor] = {}
    while stream.tell() < len(data):
        name_len = _read_u32(stream, source, "name length")
        name = _read_exact(stream, name_len, source, "name").decode("utf-8")
        records[name] = read_tensor(stream, f"{source}:{name}")
    return records


def write_archive(path: PathLike, records: Mapping[str, Tensor]) -> None:
    """Write a named archive to ``path``."""
    if not records:
        raise FormatError(str(path), "refusing to write an empty archive")
    data = encode_archive(records)
    Path(path).write_bytes(data)
    logger.debug(f"Wrote {len(records)} records ({len(data)} bytes) to {path}")


def read_archive(path: PathLike) -> Dict[str, Tensor]:
    """Read a named archive from ``path``."""
    data = Path(path).read_bytes()
    records = decode_archive(data, str(path))
    logger.debug(f"Read {len(records)} records from {path}")
    return records


def require(records: Mapping[str, Tensor], name: str, source: str) -> Tensor:
    """Fetch a record by name or raise a FormatError naming it."""
    if name not in records:
        raise FormatError(source, f"missing record '{name}'")
    return records[name]
