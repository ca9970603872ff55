"""One-shot source summaries and their binary wire format.

A site turns its released network into a :class:`SourceSummary` (top-K
eigenspace, density estimate, privacy parameters).  Only the summary is sent
to the coordinator, as one ``TNS1`` frame::

    offset  size  field
    0       4     magic b"TNS1"
    4       8     format version   (int64 LE)
    12      8     n                (int64 LE)
    20      8     k                (int64 LE)
    28      8     l                (int64 LE)
    36      8     q                (float64 LE)
    44      8     q'               (float64 LE)
    52      8     rho_hat          (float64 LE)
    60      8nk   eigenspace, row-major float64 LE
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .privacy import DebiasedNetwork, PrivacyParams, debias
from .spectral import Eigenspace, top_k_eigvecs
from .weighting import estimate_density

MAGIC = b"TNS1"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sqqqqddd")
HEADER_SIZE = HEADER.size
ORTHO_LIMIT = 1e-6


class WireFormatError(ValueError):
    """Base class for frame decoding failures."""


class BadMagicError(WireFormatError):
    pass


class UnsupportedVersionError(WireFormatError):
    pass


class TruncatedPayloadError(WireFormatError):
    pass


class TrailingDataError(WireFormatError):
    pass


class InvalidEigenspaceError(WireFormatError):
    pass


@dataclass(frozen=True)
class SourceSummary:
    eigenspace: Eigenspace
    rho_hat: float
    params: PrivacyParams
    l: int
    format_version: int = FORMAT_VERSION

    @property
    def n(self) -> int:
        return self.eigenspace.n

    @property
    def k(self) -> int:
        return self.eigenspace.k

    def __eq__(self, other):
        if not isinstance(other, SourceSummary):
            return NotImplemented
        return (
            self.l == other.l
            and self.format_version == other.format_version
            and self.params == other.params
            and np.float64(self.rho_hat).tobytes() == np.float64(other.rho_hat).tobytes()
            and self.eigenspace.basis.tobytes() == other.eigenspace.basis.tobytes()
            and self.eigenspace.basis.shape == other.eigenspace.basis.shape
        )

    __hash__ = None


def local_site_compute(a_tilde, params: PrivacyParams, k: int, debias_flag: bool = True,
                       l: int = 0, which: str = "magnitude") -> SourceSummary:
    """Summarise one released network at its owner's site.

    With ``debias_flag`` False the released matrix is used as is (ablation).
    Nothing derived from the adjacency other than the eigenspace and the
    density leaves this function.
    """
    if debias_flag:
        mat = debias(a_tilde, params)
    else:
        adj = a_tilde.adj if hasattr(a_tilde, "adj") else np.asarray(a_tilde)
        mat = DebiasedNetwork(adj.astype(float), params)
    space = top_k_eigvecs(mat.mat, k, which=which)
    rho = estimate_density(mat).value
    return SourceSummary(space, rho, params, int(l))


def encode(s: SourceSummary) -> bytes:
    if s.format_version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"cannot encode format version {s.format_version}")
    header = HEADER.pack(MAGIC, s.format_version, s.n, s.k, s.l,
                         s.params.q, s.params.q_prime, float(s.rho_hat))
    payload = np.ascontiguousarray(s.eigenspace.basis, dtype="<f8").tobytes()
    return header + payload


def decode(data: bytes) -> SourceSummary:
    """Parse one frame.

    Raises a distinct :class:`WireFormatError` subclass for a bad magic,
    unknown version, short or long payload, and a non-orthonormal basis.
    """
    data = bytes(data)
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    if len(data) < HEADER_SIZE:
        raise TruncatedPayloadError(f"truncated header: {len(data)} < {HEADER_SIZE} bytes")
    _, version, n, k, l, q, qp, rho = HEADER.unpack_from(data)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported format version {version}")
    if n < 1 or k < 1 or k > n:
        raise WireFormatError(f"invalid dimensions n={n}, k={k}")
    expected = HEADER_SIZE + 8 * n * k
    if len(data) < expected:
        raise TruncatedPayloadError(f"truncated payload: {len(data)} < {expected} bytes")
    if len(data) > expected:
        raise TrailingDataError(f"{len(data) - expected} trailing bytes after payload")
    basis = np.frombuffer(data, dtype="<f8", count=n * k, offset=HEADER_SIZE).reshape(n, k)
    basis = basis.astype(np.float64)
    err = np.linalg.norm(basis.T @ basis - np.eye(k))
    if not err <= ORTHO_LIMIT:
        raise InvalidEigenspaceError(f"invalid eigenspace: ||U^T U - I||_F = {err:.3e}")
    return SourceSummary(Eigenspace(basis), rho, PrivacyParams(q, qp), int(l), int(version))


def summary_filename(l: int) -> str:
    return f"summary_{l}.tns"


def write_summary(s: SourceSummary, directory) -> Path:
    path = Path(directory) / summary_filename(s.l)
    path.write_bytes(encode(s))
    return path


def read_summary(path) -> SourceSummary:
    return decode(Path(path).read_bytes())


def to_csv(s: SourceSummary) -> str:
    """Debug text encoding: ``key,value`` header lines, then ``n`` rows of ``k`` values."""
    buf = io.StringIO()
    for key, value in (("format_version", s.format_version), ("n", s.n), ("k", s.k),
                       ("l", s.l), ("q", repr(s.params.q)), ("q_prime", repr(s.params.q_prime)),
                       ("rho_hat", repr(float(s.rho_hat)))):
        buf.write(f"# {key},{value}\n")
    for row in s.eigenspace.basis:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue()


def from_csv(text: str) -> SourceSummary:
    meta, rows = {}, []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, value = line[1:].strip().split(",", 1)
            meta[key] = value
        else:
            rows.append([float(v) for v in line.split(",")])
    basis = np.array(rows, dtype=float).reshape(int(meta["n"]), int(meta["k"]))
    err = np.linalg.norm(basis.T @ basis - np.eye(basis.shape[1]))
    if not err <= ORTHO_LIMIT:
        raise InvalidEigenspaceError(f"invalid eigenspace: ||U^T U - I||_F = {err:.3e}")
    return SourceSummary(
        Eigenspace(basis), float(meta["rho_hat"]),
        PrivacyParams(float(meta["q"]), float(meta["q_prime"])),
        int(meta["l"]), int(meta["format_version"]),
    )
