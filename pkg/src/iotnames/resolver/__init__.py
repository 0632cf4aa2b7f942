"""DNS wire codec, resolvability probing and capture extraction."""

from . import pcap, probe, wire

__all__ = ["pcap", "probe", "wire"]
