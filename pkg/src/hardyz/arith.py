"""Divisor functions d_k(n), the smooth cutoff rho, and the shift weight h(n, U)."""
from __future__ import annotations

import math
import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DomainError, ResourceError

MAGIC = b"DKT1"
_HEADER = struct.Struct("<4sQQ")


@dataclass(frozen=True, eq=False)
class DivisorTable:
    """Exact d_k(n) for 1 <= n <= limit; ``values[0]`` is an unused 0."""

    k: int
    limit: int
    values: np.ndarray
    _float: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.values.shape != (self.limit + 1,):
            raise ValueError("values must have length limit + 1")
        self.values.setflags(write=False)

    def __getitem__(self, n):
        if isinstance(n, (int, np.integer)) and not 1 <= n <= self.limit:
            raise ResourceError(f"n={n} outside table range 1..{self.limit}", required=int(n))
        return self.values[n]

    def as_float(self) -> np.ndarray:
        """float64 copy (exact while d_k(n) < 2**53), built once."""
        if not self._float:
            arr = self.values.astype(np.float64)
            arr.setflags(write=False)
            self._float.append(arr)
        return self._float[0]

    def truncated(self, limit: int) -> "DivisorTable":
        if limit > self.limit:
            raise ResourceError(f"cannot extend table from {self.limit} to {limit}", required=limit)
        return DivisorTable(self.k, limit, self.values[: limit + 1].copy())


def _available_bytes():
    try:
        return os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (ValueError, OSError, AttributeError):  # pragma: no cover - non-POSIX
        return 1 << 34


def table_bytes(N: int) -> int:
    """Peak working memory of ``sieve_dk``: two int64 arrays plus a float copy."""
    return 3 * 8 * (N + 1)


def sieve_dk(k: int, N: int, max_bytes: int | None = None) -> DivisorTable:
    """d_k(n) for n <= N via k-1 passes of d_j = d_{j-1} * 1."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    need = table_bytes(N)
    budget = _available_bytes() // 2 if max_bytes is None else max_bytes
    if need > budget:
        raise ResourceError(f"sieving d_{k} up to {N} needs {need} bytes, budget is {budget}", required=need)
    d = np.ones(N + 1, dtype=np.int64)
    d[0] = 0
    for _ in range(k - 1):
        d = kernels.convolve_one(d)
    return DivisorTable(k, N, d)


def save_table(table: DivisorTable, path) -> None:
    """Write ``table`` in the DKT1 format, atomically."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, table.k, table.limit))
            fh.write(table.values[1:].astype("<u8").tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path) -> DivisorTable:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, k, n = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        body = np.frombuffer(fh.read(), dtype="<u8")
    if body.shape[0] != n:
        raise ValueError(f"{path}: expected {n} values, found {body.shape[0]}")
    values = np.empty(n + 1, dtype=np.int64)
    values[0] = 0
    values[1:] = body
    return DivisorTable(int(k), int(n), values)


def cached_sieve(k: int, N: int, cache_dir=None) -> DivisorTable:
    """``sieve_dk`` backed by a per-k file in ``cache_dir`` (None: no cache).

    A cached table at least as long as requested is truncated and reused; a
    shorter or unreadable one is replaced.
    """
    if cache_dir is None:
        return sieve_dk(k, N)
    path = Path(cache_dir) / f"d{k}.dkt"
    if path.exists():
        try:
            table = load_table(path)
        except (OSError, ValueError):
            table = None
        if table is not None and table.k == k and table.limit >= N:
            return table if table.limit == N else table.truncated(N)
    table = sieve_dk(k, N)
    save_table(table, path)
    return table


def brute_dk(k: int, n: int) -> int:
    """Count ordered k-tuples with product n by direct recursion (slow reference)."""
    if k == 1:
        return 1
    return sum(brute_dk(k - 1, n // m) for m in range(1, n + 1) if n % m == 0)


@dataclass(frozen=True)
class TestFunction:
    """rho(x) = 1 for x <= 1/b, 0 for x >= b, (1 - sin(pi u / 2)) / 2 between,
    with u = log(x) / log(b).  Then rho(x) + rho(1/x) = 1 identically."""

    __test__ = False  # not a pytest class

    b: float = 2.0

    def __post_init__(self):
        if not 1.0 < self.b <= 2.0:
            raise DomainError(f"b must lie in (1, 2], got {self.b}")

    def __call__(self, x):
        return rho_eval(x, self)


def rho_eval(x, f: TestFunction):
    """Vectorised rho; scalars in, float out."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(xa < 0):
        raise DomainError("rho is defined for x >= 0")
    with np.errstate(divide="ignore"):
        u = np.log(xa) / math.log(f.b)
    mid = 0.5 * (1.0 - np.sin(0.5 * math.pi * np.clip(u, -1.0, 1.0)))
    out = np.where(u <= -1.0, 1.0, np.where(u >= 1.0, 0.0, mid))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ShiftWeight:
    n: int
    U: float
    value: complex


def divisors(n: int) -> list[int]:
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def shift_weight(n: int, U: float, table: DivisorTable) -> ShiftWeight:
    """h(n, U) = n^(-iU) sum_{delta | n} d(delta) delta^(iU), divisors enumerated exactly."""
    if table.k != 2:
        raise DomainError(f"shift weight needs a d_2 table, got k={table.k}")
    if U < 0:
        raise DomainError(f"U must be >= 0, got {U}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > table.limit:
        raise ResourceError(f"n={n} exceeds table limit {table.limit}", required=n)
    ln = math.log(n)
    acc = 0j
    for delta in divisors(n):
        acc += int(table.values[delta]) * complex(math.cos(U * (math.log(delta) - ln)),
                                                   math.sin(U * (math.log(delta) - ln)))
    return ShiftWeight(n, float(U), acc)


def shift_weight_array(U: float, table: DivisorTable, N: int | None = None):
    """(re, im) arrays of h(m, U) for all m <= N by a divisor sieve."""
    N = table.limit if N is None else N
    if N > table.limit:
        raise ResourceError(f"need d_2 up to {N}, table covers {table.limit}", required=N)
    return kernels.shift_weight_table(table.as_float(), U, N)
