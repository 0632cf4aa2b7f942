"""QNAME extraction from classic pcap captures.

Walks Ethernet/IPv4/IPv6/UDP frames, keeps DNS responses (source port 53,
QR set), and files each response's question name under the device class of
the destination address.  Devices are known by MAC or IP; when both match,
MAC wins.  Anything that is not a mapped DNS response is skipped; packets
that fail to parse are tallied, never fatal.
"""

import csv
import re
import struct
from dataclasses import dataclass, field
from ipaddress import ip_address
from pathlib import Path

from ..errors import InputError
from ..names import DOT, DomainName
from ..corpus import CLASSES, NameList
from . import wire

# Accepted magics: microsecond and nanosecond variants, either byte order.
_MAGICS = {
    0xA1B2C3D4: ">",
    0xA1B23C4D: ">",
    0xD4C3B2A1: "<",
    0x4D3CB2A1: "<",
}

LINKTYPE_ETHERNET = 1

_ETHERTYPE_IPV4 = 0x0800
_ETHERTYPE_IPV6 = 0x86DD
_PROTO_UDP = 17
_DNS_PORT = 53

_MAC_RE = re.compile(r"^[0-9a-f]{2}(:[0-9a-f]{2}){5}$")


class PcapFormatError(InputError):
    """Raised when the capture file itself is unreadable."""


@dataclass
class DeviceMap:
    """address -> class lookup, MAC entries taking precedence over IP."""

    by_mac: dict[str, str] = field(default_factory=dict)
    by_ip: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_csv(cls, path) -> "DeviceMap":
        path = Path(path)
        if not path.is_file():
            raise InputError(f"device map not found: {path}")
        devices = cls()
        with open(path, encoding="utf-8", newline="") as handle:
            for lineno, row in enumerate(csv.reader(handle), start=1):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if len(row) != 2:
                    raise InputError(f"{path}:{lineno}: expected address,class")
                address, tag = row[0].strip().lower(), row[1].strip()
                if tag not in CLASSES:
                    raise InputError(f"{path}:{lineno}: unknown class {tag!r}")
                if _MAC_RE.match(address):
                    devices.by_mac[address] = tag
                else:
                    try:
                        devices.by_ip[ip_address(address).compressed] = tag
                    except ValueError as exc:
                        raise InputError(
                            f"{path}:{lineno}: {address!r} is neither MAC nor IP"
                        ) from exc
        if not devices.by_mac and not devices.by_ip:
            raise InputError(f"{path}: no devices mapped")
        return devices

    def lookup(self, mac: str, ip: str | None) -> str | None:
        tag = self.by_mac.get(mac)
        if tag is None and ip is not None:
            tag = self.by_ip.get(ip)
        return tag


@dataclass
class ExtractionResult:
    lists: dict[str, NameList]
    packets: int = 0
    matched: int = 0
    unmapped: int = 0
    parse_failures: int = 0


def _format_mac(raw: bytes) -> str:
    return ":".join(f"{b:02x}" for b in raw)


def _dns_payload(frame: bytes) -> tuple[str, str, bytes] | None:
    """Pull (dst_mac, dst_ip, dns_bytes) out of one Ethernet frame.

    Returns None for frames that are not UDP source-port-53 traffic.  Raises
    ValueError when the frame claims to be one but is cut short.
    """
    if len(frame) < 14:
        raise ValueError("short ethernet header")
    dst_mac = _format_mac(frame[0:6])
    ethertype = struct.unpack_from("!H", frame, 12)[0]
    if ethertype == _ETHERTYPE_IPV4:
        if len(frame) < 34:
            raise ValueError("short ipv4 header")
        ihl = (frame[14] & 0x0F) * 4
        if frame[14] >> 4 != 4 or ihl < 20:
            raise ValueError("bad ipv4 header")
        if len(frame) < 14 + ihl:
            raise ValueError("truncated ipv4 options")
        flags_frag = struct.unpack_from("!H", frame, 20)[0]
        if flags_frag & 0x1FFF:
            return None  # non-first fragment carries no UDP header
        proto = frame[23]
        dst_ip = ip_address(frame[30:34]).compressed
        transport = 14 + ihl
    elif ethertype == _ETHERTYPE_IPV6:
        if len(frame) < 54:
            raise ValueError("short ipv6 header")
        proto = frame[20]
        dst_ip = ip_address(frame[38:54]).compressed
        transport = 54
    else:
        return None
    if proto != _PROTO_UDP:
        return None
    if len(frame) < transport + 8:
        raise ValueError("truncated udp header")
    sport, dport, udp_len = struct.unpack_from("!HHH", frame, transport)
    if sport != _DNS_PORT:
        return None
    payload = frame[transport + 8:transport + max(udp_len, 8)]
    return dst_mac, dst_ip, payload


def extract_qnames(capture_path, devices: DeviceMap) -> ExtractionResult:
    """Collect per-device-class question names from a capture file."""
    capture_path = Path(capture_path)
    if not capture_path.is_file():
        raise InputError(f"capture file not found: {capture_path}")
    data = capture_path.read_bytes()
    if len(data) < 24:
        raise PcapFormatError(f"{capture_path}: shorter than a pcap global header")
    magic = struct.unpack_from(">I", data, 0)[0]
    endian = _MAGICS.get(magic)
    if endian is None:
        raise PcapFormatError(f"{capture_path}: unknown magic 0x{magic:08x}")
    linktype = struct.unpack_from(endian + "I", data, 20)[0]
    if linktype != LINKTYPE_ETHERNET:
        raise PcapFormatError(f"{capture_path}: link type {linktype} is not Ethernet")

    result = ExtractionResult(lists={})
    seen: dict[str, set[str]] = {}
    record = struct.Struct(endian + "IIII")
    offset = 24
    while offset < len(data):
        if offset + record.size > len(data):
            result.parse_failures += 1
            break
        _, _, incl_len, _ = record.unpack_from(data, offset)
        offset += record.size
        if offset + incl_len > len(data):
            result.parse_failures += 1
            break
        frame = data[offset:offset + incl_len]
        offset += incl_len
        result.packets += 1
        try:
            hit = _dns_payload(frame)
            if hit is None:
                continue
            dst_mac, dst_ip, payload = hit
            message = wire.decode_message(payload)
            if not message.qr or not message.questions:
                continue
            labels = tuple(label.lower() for label in message.questions[0].name)
            if not labels or any(lbl == "" or DOT in lbl for lbl in labels):
                raise ValueError("unusable question name")
        except (ValueError, wire.DecodeError):
            result.parse_failures += 1
            continue
        tag = devices.lookup(dst_mac, dst_ip)
        if tag is None:
            result.unmapped += 1
            continue
        result.matched += 1
        if tag not in result.lists:
            result.lists[tag] = NameList(tag, tag, [], provenance=f"pcap:{capture_path}")
            seen[tag] = set()
        dotted = DOT.join(labels)
        if dotted not in seen[tag]:
            seen[tag].add(dotted)
            result.lists[tag].names.append(DomainName(raw=dotted, labels=labels))
    return result
