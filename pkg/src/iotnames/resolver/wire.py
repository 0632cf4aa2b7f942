"""DNS message wire format (RFC 1035) with EDNS0 (RFC 6891).

Message layout:

                +---------------------+
                |        Header       |  ID, flags, section counts
                +---------------------+
                |       Question      |  QNAME, QTYPE, QCLASS
                +---------------------+
                |        Answer       |  resource records
                +---------------------+
                |      Authority      |  resource records
                +---------------------+
                |      Additional     |  resource records (incl. OPT)
                +---------------------+

Names are length-prefixed label sequences terminated by a zero octet.
Decoding follows compression pointers (two high bits set) with guards
against forward references and loops; encoding never compresses, so
decode(encode(message)) round-trips exactly.
"""

import struct
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import InputError

TYPE_A = 1
TYPE_AAAA = 28
TYPE_OPT = 41
CLASS_IN = 1

RCODE_NOERROR = 0
RCODE_FORMERR = 1
RCODE_SERVFAIL = 2
RCODE_NXDOMAIN = 3
RCODE_NOTIMP = 4
RCODE_REFUSED = 5

RCODE_NAMES = {
    RCODE_NOERROR: "NOERROR",
    RCODE_FORMERR: "FORMERR",
    RCODE_SERVFAIL: "SERVFAIL",
    RCODE_NXDOMAIN: "NXDOMAIN",
    RCODE_NOTIMP: "NOTIMP",
    RCODE_REFUSED: "REFUSED",
}

EDNS_PAYLOAD = 1232

MAX_LABEL_OCTETS = 63
MAX_NAME_OCTETS = 255

_HEADER = struct.Struct("!HHHHHH")
_QFIXED = struct.Struct("!HH")
_RRFIXED = struct.Struct("!HHIH")


class EncodeError(InputError):
    """Raised when a message cannot be represented on the wire."""


class DecodeError(InputError):
    """Raised when wire bytes cannot be parsed; carries the failing offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Question:
    name: tuple[str, ...]
    qtype: int = TYPE_A
    qclass: int = CLASS_IN


@dataclass(frozen=True)
class ResourceRecord:
    name: tuple[str, ...]
    rtype: int
    rclass: int
    ttl: int
    rdata: bytes


@dataclass
class DnsMessage:
    id: int
    qr: bool = False
    opcode: int = 0
    aa: bool = False
    tc: bool = False
    rd: bool = True
    ra: bool = False
    rcode: int = RCODE_NOERROR
    questions: list[Question] = field(default_factory=list)
    answers: list[ResourceRecord] = field(default_factory=list)
    authority: list[ResourceRecord] = field(default_factory=list)
    additional: list[ResourceRecord] = field(default_factory=list)

    @property
    def answer_count(self) -> int:
        return len(self.answers)

    @property
    def authority_count(self) -> int:
        return len(self.authority)

    @property
    def additional_count(self) -> int:
        return len(self.additional)


def _label_bytes(label: str) -> bytes:
    return label.encode("utf-8")


def _label_text(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def encode_name(labels: Sequence[str]) -> bytes:
    """Encode labels as length-prefixed octets plus the root terminator."""
    out = bytearray()
    for label in labels:
        raw = _label_bytes(label)
        if not 1 <= len(raw) <= MAX_LABEL_OCTETS:
            raise EncodeError(
                f"label {label!r} is {len(raw)} octets, outside 1..{MAX_LABEL_OCTETS}"
            )
        out.append(len(raw))
        out += raw
    out.append(0)
    if len(out) > MAX_NAME_OCTETS:
        raise EncodeError(f"name needs {len(out)} octets, limit {MAX_NAME_OCTETS}")
    return bytes(out)


def decode_name(data: bytes, offset: int) -> tuple[tuple[str, ...], int]:
    """Decode a possibly compressed name.

    Returns the labels and the offset just past the name in the original
    stream.  Pointers must reference earlier offsets; loops and forward
    references raise DecodeError.
    """
    labels: list[str] = []
    visited: set[int] = set()
    pos = offset
    next_offset = -1
    jumped = False
    octets = 0
    while True:
        if pos >= len(data):
            raise DecodeError("name runs past end of message", pos)
        length = data[pos]
        if length & 0xC0 == 0xC0:
            if pos + 1 >= len(data):
                raise DecodeError("truncated compression pointer", pos)
            target = ((length & 0x3F) << 8) | data[pos + 1]
            if not jumped:
                next_offset = pos + 2
                jumped = True
            if target >= pos:
                raise DecodeError(f"compression pointer to {target} is not backward", pos)
            if target in visited:
                raise DecodeError("compression pointer loop", pos)
            visited.add(target)
            pos = target
        elif length & 0xC0:
            raise DecodeError(f"reserved label type 0x{length:02x}", pos)
        elif length == 0:
            if not jumped:
                next_offset = pos + 1
            return tuple(labels), next_offset
        else:
            end = pos + 1 + length
            if end > len(data):
                raise DecodeError("label runs past end of message", pos)
            labels.append(_label_text(data[pos + 1:end]))
            octets += length + 1
            if octets + 1 > MAX_NAME_OCTETS:
                raise DecodeError(f"name exceeds {MAX_NAME_OCTETS} octets", pos)
            pos = end


def _encode_flags(msg: DnsMessage) -> int:
    for name, value, limit in (("opcode", msg.opcode, 15), ("rcode", msg.rcode, 15)):
        if not 0 <= value <= limit:
            raise EncodeError(f"{name} {value} outside 0..{limit}")
    return (
        (int(msg.qr) << 15)
        | (msg.opcode << 11)
        | (int(msg.aa) << 10)
        | (int(msg.tc) << 9)
        | (int(msg.rd) << 8)
        | (int(msg.ra) << 7)
        | msg.rcode
    )


def encode_message(msg: DnsMessage) -> bytes:
    """Serialize a message without compression."""
    if not 0 <= msg.id <= 0xFFFF:
        raise EncodeError(f"message id {msg.id} outside 0..65535")
    out = bytearray(
        _HEADER.pack(
            msg.id,
            _encode_flags(msg),
            len(msg.questions),
            len(msg.answers),
            len(msg.authority),
            len(msg.additional),
        )
    )
    for question in msg.questions:
        out += encode_name(question.name)
        out += _QFIXED.pack(question.qtype, question.qclass)
    for record in (*msg.answers, *msg.authority, *msg.additional):
        out += encode_name(record.name)
        if len(record.rdata) > 0xFFFF:
            raise EncodeError(f"rdata of {len(record.rdata)} octets does not fit")
        out += _RRFIXED.pack(record.rtype, record.rclass, record.ttl & 0xFFFFFFFF, len(record.rdata))
        out += record.rdata
    return bytes(out)


def decode_message(data: bytes) -> DnsMessage:
    """Parse header, question and all resource record sections."""
    if len(data) < _HEADER.size:
        raise DecodeError("message shorter than header", len(data))
    msg_id, flags, qdcount, ancount, nscount, arcount = _HEADER.unpack_from(data, 0)
    msg = DnsMessage(
        id=msg_id,
        qr=bool(flags & 0x8000),
        opcode=(flags >> 11) & 0xF,
        aa=bool(flags & 0x0400),
        tc=bool(flags & 0x0200),
        rd=bool(flags & 0x0100),
        ra=bool(flags & 0x0080),
        rcode=flags & 0xF,
    )
    offset = _HEADER.size
    for _ in range(qdcount):
        name, offset = decode_name(data, offset)
        if offset + _QFIXED.size > len(data):
            raise DecodeError("truncated question", offset)
        qtype, qclass = _QFIXED.unpack_from(data, offset)
        offset += _QFIXED.size
        msg.questions.append(Question(name, qtype, qclass))
    for count, section in ((ancount, msg.answers), (nscount, msg.authority), (arcount, msg.additional)):
        for _ in range(count):
            name, offset = decode_name(data, offset)
            if offset + _RRFIXED.size > len(data):
                raise DecodeError("truncated resource record", offset)
            rtype, rclass, ttl, rdlength = _RRFIXED.unpack_from(data, offset)
            offset += _RRFIXED.size
            if offset + rdlength > len(data):
                raise DecodeError("rdata runs past end of message", offset)
            section.append(
                ResourceRecord(name, rtype, rclass, ttl, bytes(data[offset:offset + rdlength]))
            )
            offset += rdlength
    return msg


def make_query(
    name: Sequence[str],
    msg_id: int,
    qtype: int = TYPE_A,
    recursion_desired: bool = True,
    edns_payload: int | None = EDNS_PAYLOAD,
) -> DnsMessage:
    """Build a standard query, advertising EDNS0 unless edns_payload is None."""
    msg = DnsMessage(id=msg_id, rd=recursion_desired)
    msg.questions.append(Question(tuple(name), qtype, CLASS_IN))
    if edns_payload is not None:
        msg.additional.append(
            ResourceRecord(name=(), rtype=TYPE_OPT, rclass=edns_payload, ttl=0, rdata=b"")
        )
    return msg


def encode_query(
    name: Sequence[str],
    msg_id: int,
    qtype: int = TYPE_A,
    recursion_desired: bool = True,
    edns_payload: int | None = EDNS_PAYLOAD,
) -> bytes:
    return encode_message(make_query(name, msg_id, qtype, recursion_desired, edns_payload))
