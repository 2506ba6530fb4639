"""Embedding sets: validation, text-format loaders, and the canonical binary file.

Coordinates are held in float64 for computation and serialized at float32
(the precision of upstream embedding dumps). The canonical container is:

    magic   4 bytes  b"SEMB"
    version u32 LE   1
    flags   u32 LE   bit 0 = normalized (other bits must be zero)
    n_vocab u64 LE
    dim     u32 LE
    tokens  n_vocab * (u32 LE byte length + UTF-8 bytes)
    matrix  n_vocab * dim float32 LE, row-major
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from .errors import (
    DegenerateVectorError,
    DuplicateTokenError,
    FormatError,
    InvariantError,
)

NORM_TOL = 1e-6


@dataclass(frozen=True)
class TokenRef:
    """A (index, token) pair resolved against a specific EmbeddingSet."""
    index: int
    token: str


class EmbeddingSet:
    """Immutable vocabulary plus row-per-token embedding matrix."""

    def __init__(self, tokens, matrix, normalized: bool = False):
        tokens = tuple(tokens)
        matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        if len(tokens) == 0:
            raise InvariantError("empty vocabulary")
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise InvariantError(
                f"matrix shape {matrix.shape} does not match {len(tokens)} tokens")
        if matrix.shape[1] < 1:
            raise InvariantError("embedding dimension must be >= 1")
        if not np.all(np.isfinite(matrix)):
            raise InvariantError("matrix contains NaN or Inf")
        index = {}
        for i, tok in enumerate(tokens):
            if not tok:
                raise InvariantError(f"empty token at row {i}")
            if tok in index:
                raise DuplicateTokenError(tok)
            index[tok] = i
        if normalized:
            norms = np.linalg.norm(matrix, axis=1)
            if np.any(np.abs(norms - 1.0) > NORM_TOL):
                bad = int(np.argmax(np.abs(norms - 1.0)))
                raise InvariantError(
                    f"normalized flag set but row {bad} ({tokens[bad]!r}) "
                    f"has norm {norms[bad]!r}")
        self.tokens = tokens
        self.matrix = matrix
        self.normalized = bool(normalized)
        self._index = index
        self.matrix.setflags(write=False)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def index_of(self, token: str) -> int | None:
        return self._index.get(token)

    def ref(self, token: str) -> TokenRef:
        """Exact-match (case-sensitive) lookup; KeyError if absent."""
        try:
            return TokenRef(self._index[token], token)
        except KeyError:
            raise KeyError(token) from None

    def ref_at(self, index: int) -> TokenRef:
        return TokenRef(index, self.tokens[index])

    def vector(self, index: int) -> np.ndarray:
        return self.matrix[index]


def l2_normalize(es: EmbeddingSet) -> EmbeddingSet:
    """Unit-normalize every row; raises on zero rows. Idempotent."""
    norms = np.linalg.norm(es.matrix, axis=1)
    zero = np.where(norms == 0.0)[0]
    if zero.size:
        raise DegenerateVectorError(
            f"zero vector for token {es.tokens[int(zero[0])]!r}")
    return EmbeddingSet(es.tokens, es.matrix / norms[:, None], normalized=True)


def _decode_lines(data: bytes) -> list[str]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"not valid UTF-8: {e}") from None
    return text.splitlines()


def _parse_row(parts: list[str], dims: int, lineno: int):
    token = parts[0]
    if len(parts) - 1 != dims:
        raise FormatError(
            f"line {lineno}: expected {dims} coordinates, got {len(parts) - 1}")
    try:
        row = [float(p) for p in parts[1:]]
    except ValueError:
        raise FormatError(f"line {lineno}: non-numeric coordinate") from None
    if not all(math.isfinite(v) for v in row):
        raise FormatError(f"line {lineno}: non-finite coordinate")
    if not token:
        raise FormatError(f"line {lineno}: empty token")
    return token, row


def load_word2vec_text(source: BinaryIO) -> EmbeddingSet:
    """Load the word2vec text format: '<N> <D>' header, then token + coords."""
    lines = _decode_lines(source.read())
    if not lines:
        raise FormatError("empty stream")
    header = lines[0].split(" ")
    if len(header) != 2:
        raise FormatError("header must be '<N_vocab> <D>'")
    try:
        n, d = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError("non-integer header") from None
    if n < 1 or d < 1:
        raise FormatError(f"invalid header dimensions {n} x {d}")
    body = lines[1:]
    if len(body) != n:
        raise FormatError(f"header says {n} rows, stream has {len(body)}")
    return _load_rows(body, d, first_lineno=2)


def load_glove_text(source: BinaryIO, dims: int) -> EmbeddingSet:
    """Load headerless GloVe text: one '<token> <coords...>' line per token."""
    if dims < 1:
        raise FormatError("dims must be >= 1")
    lines = _decode_lines(source.read())
    if not lines:
        raise FormatError("empty stream")
    return _load_rows(lines, dims, first_lineno=1)


def _load_rows(lines: list[str], dims: int, first_lineno: int) -> EmbeddingSet:
    tokens: list[str] = []
    seen: set[str] = set()
    rows = np.empty((len(lines), dims), dtype=np.float64)
    for i, line in enumerate(lines):
        token, row = _parse_row(line.split(" "), dims, first_lineno + i)
        if token in seen:
            raise DuplicateTokenError(token)
        seen.add(token)
        tokens.append(token)
        rows[i] = row
    try:
        return EmbeddingSet(tokens, rows)
    except InvariantError as e:
        raise FormatError(str(e)) from None


def save_word2vec_text(es: EmbeddingSet, sink: BinaryIO) -> None:
    """Write word2vec text format, coordinates at 9 significant digits."""
    sink.write(f"{len(es)} {es.dim}\n".encode("utf-8"))
    _write_rows(es, sink)


def save_glove_text(es: EmbeddingSet, sink: BinaryIO) -> None:
    """Write headerless GloVe text, coordinates at 9 significant digits."""
    _write_rows(es, sink)


def _write_rows(es: EmbeddingSet, sink: BinaryIO) -> None:
    for token, row in zip(es.tokens, es.matrix):
        coords = " ".join(f"{v:.9g}" for v in row)
        sink.write(f"{token} {coords}\n".encode("utf-8"))


_MAGIC = b"SEMB"
_VERSION = 1
_FLAG_NORMALIZED = 1


def save_canonical(es: EmbeddingSet, sink: BinaryIO) -> None:
    if len(es) == 0:  # unreachable through the constructor, kept as a guard
        raise InvariantError("empty vocabulary")
    flags = _FLAG_NORMALIZED if es.normalized else 0
    sink.write(_MAGIC)
    sink.write(struct.pack("<IIQI", _VERSION, flags, len(es), es.dim))
    for token in es.tokens:
        raw = token.encode("utf-8")
        sink.write(struct.pack("<I", len(raw)))
        sink.write(raw)
    sink.write(es.matrix.astype("<f4").tobytes(order="C"))


def load_canonical(source: BinaryIO) -> EmbeddingSet:
    data = source.read()
    if data[:4] != _MAGIC:
        raise FormatError("bad magic bytes")
    if len(data) < 24:
        raise FormatError("truncated header")
    version, flags, n, d = struct.unpack_from("<IIQI", data, 4)
    if version != _VERSION:
        raise FormatError(f"unsupported version {version}")
    if flags & ~_FLAG_NORMALIZED:
        raise FormatError(f"unknown flag bits 0x{flags:x}")
    pos = 24
    tokens = []
    for _ in range(n):
        if pos + 4 > len(data):
            raise FormatError("truncated token table")
        (length,) = struct.unpack_from("<I", data, pos)
        pos += 4
        if pos + length > len(data):
            raise FormatError("truncated token table")
        try:
            tokens.append(data[pos:pos + length].decode("utf-8"))
        except UnicodeDecodeError:
            raise FormatError("token is not valid UTF-8") from None
        pos += length
    need = n * d * 4
    if len(data) - pos != need:
        raise FormatError(
            f"matrix payload is {len(data) - pos} bytes, expected {need}")
    matrix = np.frombuffer(data, dtype="<f4", count=n * d, offset=pos)
    matrix = matrix.reshape(n, d).astype(np.float64)
    if not np.all(np.isfinite(matrix)):
        raise FormatError("matrix contains NaN or Inf")
    try:
        return EmbeddingSet(tokens, matrix,
                            normalized=bool(flags & _FLAG_NORMALIZED))
    except (InvariantError, DuplicateTokenError) as e:
        raise FormatError(str(e)) from None
