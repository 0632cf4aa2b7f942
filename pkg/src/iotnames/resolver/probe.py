"""Resolvability probing over UDP.

Each name is probed with an A query.  The verdict is three-way:

  resolvable     NOERROR, with or without answer records (a NOERROR answer
                 with zero records is an empty non-terminal, which exists)
  unresolvable   NXDOMAIN
  indeterminate  every attempt timed out or drew SERVFAIL/REFUSED (or any
                 other error rcode), so nothing can be said about the name

Truncated responses get one extra attempt; a transport-level send failure
raises instead of producing a verdict, because it says nothing about the
name.  Results never depend on wall-clock timing beyond the timeout budget.
"""

import secrets
import socket
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from . import wire

STATUS_RESOLVABLE = "resolvable"
STATUS_UNRESOLVABLE = "unresolvable"
STATUS_INDETERMINATE = "indeterminate"


class TransportError(OSError):
    """Raised when the query cannot be sent at all."""


@dataclass(frozen=True)
class ResolutionVerdict:
    name: str
    status: str
    rcode: int | None
    answer_count: int
    attempts: int


def _parse_server(server: str) -> tuple[str, int]:
    host, sep, port = server.rpartition(":")
    if sep and port.isdigit() and not host.endswith(":"):
        return host or port, int(port)
    return server, 53


def probe_resolvable(
    name: Sequence[str],
    server: str,
    timeout: float = 3.0,
    retries: int = 2,
    edns_payload: int | None = wire.EDNS_PAYLOAD,
) -> ResolutionVerdict:
    """Probe one name (given as labels) against server ("host" or "host:port")."""
    labels = tuple(name)
    dotted = ".".join(labels)
    address = _parse_server(server)
    family = socket.AF_INET6 if ":" in address[0] else socket.AF_INET
    attempts = 0
    budget = retries + 1
    truncation_retry_left = 1
    last_rcode: int | None = None
    while attempts < budget:
        attempts += 1
        msg_id = secrets.randbelow(0x10000)
        query = wire.encode_query(labels, msg_id, edns_payload=edns_payload)
        try:
            sock = socket.socket(family, socket.SOCK_DGRAM)
        except OSError as exc:
            raise TransportError(f"cannot open UDP socket: {exc}") from exc
        try:
            sock.settimeout(timeout)
            try:
                sock.sendto(query, address)
            except OSError as exc:
                raise TransportError(f"cannot send to {server}: {exc}") from exc
            deadline = time.monotonic() + timeout
            response = None
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                sock.settimeout(remaining)
                try:
                    data, _ = sock.recvfrom(4096)
                except socket.timeout:
                    break
                except OSError:
                    break
                try:
                    candidate = wire.decode_message(data)
                except wire.DecodeError:
                    continue
                if candidate.id == msg_id and candidate.qr:
                    response = candidate
                    break
        finally:
            sock.close()
        if response is None:
            continue
        if response.tc:
            if truncation_retry_left:
                truncation_retry_left -= 1
                budget += 1
            continue
        last_rcode = response.rcode
        if response.rcode == wire.RCODE_NOERROR:
            return ResolutionVerdict(
                dotted, STATUS_RESOLVABLE, response.rcode, response.answer_count, attempts
            )
        if response.rcode == wire.RCODE_NXDOMAIN:
            return ResolutionVerdict(
                dotted, STATUS_UNRESOLVABLE, response.rcode, response.answer_count, attempts
            )
        # SERVFAIL, REFUSED and friends: try again, then give up.
    return ResolutionVerdict(dotted, STATUS_INDETERMINATE, last_rcode, 0, attempts)


def probe_names(
    names: Sequence[Sequence[str]],
    server: str,
    timeout: float = 3.0,
    retries: int = 2,
    max_inflight: int = 64,
    edns_payload: int | None = wire.EDNS_PAYLOAD,
) -> list[ResolutionVerdict]:
    """Probe many names concurrently; verdicts come back in input order."""
    if max_inflight < 1:
        raise ValueError(f"max_inflight must be positive, got {max_inflight}")
    if not names:
        return []
    with ThreadPoolExecutor(max_workers=min(max_inflight, len(names))) as pool:
        return list(
            pool.map(
                lambda labels: probe_resolvable(labels, server, timeout, retries, edns_payload),
                names,
            )
        )
