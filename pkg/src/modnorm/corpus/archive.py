"""Archive clients for restoring the bodies of removed comments."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Union

import httpx

log = logging.getLogger(__name__)


class ArchiveTransportError(Exception):
    """Transient transport failure talking to an archive backend."""


class ArchiveClient(Protocol):
    """Looks up the archived body of a comment by id."""

    retries: int

    def get_body(self, comment_id: str) -> Optional[str]:
        """Return the archived body, or None when the archive lacks it.

        Raises ArchiveTransportError on transient failures.
        """
        ...


@dataclass
class HttpArchiveClient:
    """Archive lookup against an HTTP endpoint serving comment records."""

    base_url: str
    retries: int = 2
    timeout: float = 10.0

    def get_body(self, comment_id: str) -> Optional[str]:
        url = f"{self.base_url.rstrip('/')}/comments/{comment_id}"
        try:
            response = httpx.get(url, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise ArchiveTransportError(str(exc)) from exc
        if response.status_code == 404:
            return None
        if response.status_code >= 500:
            raise ArchiveTransportError(f"archive returned {response.status_code}")
        response.raise_for_status()
        return response.json().get("body")


class FileArchiveClient:
    """Stub archive backed by a local newline-delimited record file."""

    def __init__(self, path: Union[str, Path], retries: int = 2):
        self.retries = retries
        self._bodies: dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                self._bodies[record["id"]] = record["body"]

    def get_body(self, comment_id: str) -> Optional[str]:
        return self._bodies.get(comment_id)


def write_archive(bodies: dict[str, str], path: Union[str, Path]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for comment_id in sorted(bodies):
            handle.write(
                json.dumps({"id": comment_id, "body": bodies[comment_id]}) + "\n"
            )
            count += 1
    return count


def fetch_removed_body(
    comment_id: str, archive_client: ArchiveClient, retries: Optional[int] = None
) -> Optional[str]:
    """Fetch an archived comment body, retrying transient failures.

    Returns None when the archive does not hold the comment or when retries
    are exhausted; callers flag such conversations forecast-only.
    """
    attempts = 1 + (retries if retries is not None else getattr(archive_client, "retries", 0))
    last_error: Optional[Exception] = None
    for _ in range(attempts):
        try:
            return archive_client.get_body(comment_id)
        except ArchiveTransportError as exc:
            last_error = exc
    log.warning("archive lookup failed for %s after %d attempts: %s", comment_id, attempts, last_error)
    return None
