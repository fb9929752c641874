"""Write-through cache for Rel(K_n) and sRel(K_n).

Files ``rel_K{n}.poly`` / ``srel_K{n}.poly`` hold the polynomial text format
followed by a line ``checksum sha256 <hex>`` over the preceding bytes. Files
are written once (temp file + rename) and never modified; a file whose
checksum does not match is ignored, logged and replaced.
"""

from __future__ import annotations

import hashlib
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Callable

from .errors import CacheCorruption
from .polyalg import IntPolynomial, format_poly_text, parse_poly_text

log = logging.getLogger(__name__)

CHECKSUM_PREFIX = "checksum sha256 "


def encode_cache_file(p: IntPolynomial) -> str:
    body = format_poly_text(p)
    digest = hashlib.sha256(body.encode()).hexdigest()
    return body + CHECKSUM_PREFIX + digest + "\n"


def decode_cache_file(text: str) -> IntPolynomial:
    body, sep, tail = text.rpartition(CHECKSUM_PREFIX)
    if not sep:
        raise CacheCorruption("missing checksum line")
    if hashlib.sha256(body.encode()).hexdigest() != tail.strip():
        raise CacheCorruption("checksum mismatch")
    return parse_poly_text(body)


class KnCache:
    """Memoised complete-graph polynomials, optionally persisted in ``directory``.

    Readers never take the lock; insertion is serialised so a value is
    computed and written at most once per process.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else None
        self._table: dict[tuple[str, int], IntPolynomial] = {}
        self._lock = threading.RLock()

    def _path(self, kind: str, n: int) -> Path:
        assert self.directory is not None
        return self.directory / f"{kind}_K{n}.poly"

    def get(self, kind: str, n: int) -> IntPolynomial | None:
        key = (kind, n)
        p = self._table.get(key)
        if p is not None or self.directory is None:
            return p
        path = self._path(kind, n)
        if not path.exists():
            return None
        try:
            p = decode_cache_file(path.read_text())
        except (CacheCorruption, ValueError) as exc:
            log.warning("discarding corrupt cache file %s: %s", path, exc)
            return None
        self._table.setdefault(key, p)
        return p

    def get_or_compute(self, kind: str, n: int, compute: Callable[[], IntPolynomial]) -> IntPolynomial:
        p = self.get(kind, n)
        if p is not None:
            return p
        with self._lock:
            p = self.get(kind, n)
            if p is not None:
                return p
            p = compute()
            self._table[(kind, n)] = p
            if self.directory is not None:
                self._write(self._path(kind, n), encode_cache_file(p))
            return p

    def _write(self, path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def checksums(self) -> dict[str, str]:
        """File name -> sha256 of every cache file on disk (for run manifests)."""
        if self.directory is None or not self.directory.exists():
            return {}
        out = {}
        for f in sorted(self.directory.glob("*.poly")):
            text = f.read_text()
            out[f.name] = text.rpartition(CHECKSUM_PREFIX)[2].strip()
        return out


_default_cache: KnCache | None = None


def default_cache() -> KnCache:
    """Process-wide cache; persisted if ``RELROOTS_CACHE_DIR`` is set."""
    global _default_cache
    if _default_cache is None:
        _default_cache = KnCache(os.environ.get("RELROOTS_CACHE_DIR") or None)
    return _default_cache


def set_default_cache(cache: KnCache) -> None:
    global _default_cache
    _default_cache = cache
