"""Builders for synthetic Ethernet/IP/UDP/DNS frames and pcap files.

Used by the capture-extraction tests and by the one-off script that wrote
tests/data/dns_capture.pcap.
"""

import struct

from iotnames.resolver import wire

MAGIC_MICRO = 0xA1B2C3D4
MAGIC_NANO = 0xA1B23C4D


def dns_response(labels, msg_id=0x1234, answers=1, qr=True):
    msg = wire.DnsMessage(id=msg_id, qr=qr, ra=True)
    msg.questions.append(wire.Question(tuple(labels)))
    for _ in range(answers):
        msg.answers.append(
            wire.ResourceRecord(tuple(labels), wire.TYPE_A, wire.CLASS_IN, 60, b"\x0a\x00\x00\x02")
        )
    return wire.encode_message(msg)


def udp(payload, sport=53, dport=40000):
    return struct.pack("!HHHH", sport, dport, 8 + len(payload), 0) + payload


def ipv4(payload, dst_ip, src_ip=b"\x0a\x00\x00\x02", frag=0):
    header = struct.pack(
        "!BBHHHBBH4s4s",
        0x45,
        0,
        20 + len(payload),
        0,
        frag,
        64,
        17,
        0,
        src_ip,
        dst_ip,
    )
    return header + payload


def ipv6(payload, dst_ip, src_ip=b"\x20\x01" + b"\x00" * 13 + b"\x02"):
    header = struct.pack("!IHBB", 0x60000000, len(payload), 17, 64) + src_ip + dst_ip
    return header + payload


def ethernet(payload, dst_mac, ethertype=0x0800, src_mac=b"\xaa\xbb\xcc\x00\x00\x01"):
    return dst_mac + src_mac + struct.pack("!H", ethertype) + payload


def dns_frame(labels, dst_mac, dst_ip, msg_id=0x1234, answers=1, sport=53, v6=False):
    payload = udp(dns_response(labels, msg_id=msg_id, answers=answers), sport=sport)
    if v6:
        return ethernet(ipv6(payload, dst_ip), dst_mac, ethertype=0x86DD)
    return ethernet(ipv4(payload, dst_ip), dst_mac)


def pcap(frames, magic=MAGIC_MICRO, endian=">", linktype=1):
    out = struct.pack(endian + "IHHiIII", magic, 2, 4, 0, 0, 65535, linktype)
    for seconds, frame in enumerate(frames):
        out += struct.pack(endian + "IIII", seconds, 0, len(frame), len(frame)) + frame
    return out
