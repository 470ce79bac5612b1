"""Wire formats for the three over-the-air packet types.

SignalPacket (cluster assignment, sink -> CH), fixed 11 bytes:

    offset  size  field
    0       1     ch_id
    1       1     public_key
    2       1     private_key
    3       4     cm_ids, one byte each, 0xFF marks an empty slot
    7       1     neighbor_ch_id (upstream CH, or the sink id)
    8       3     reserved, zero on encode, ignored on decode

ChFrame (aggregated cluster data, CH -> upstream), 13 + payload bytes:

    offset  size  field
    0       1     flags, MSB first:
                      bit 7    hierarchical (0 = flat routing frame)
                      bit 6    is_ch
                      bits 5-4 role (0 none, 1 prover, 2 verifier, 3 both)
                      bit 3    trap_enable
                      bit 2    mine_enable
                      bit 1    promisc_enable
                      bit 0    reserved, zero
    1       1     node_id
    2       1     energy (quantized, see quantize_energy)
    3       1     next_ch_id
    4       1     cm_id
    5       1     cm_energy
    6       1+n   cm_payload, length prefix then n bytes (n <= 255)
    7+n     1     secret_key
    8+n     1     public_key
    9+n     1     cm_energy2
    10+n    3     mzkp_status, promisc_status, mine_status (0/1/2 each)

A frame with the hierarchical bit clear is a flat-routing frame: only the
flag byte, node_id and energy carry meaning, and every other field must be
zero / empty.

CmReport (member reading, CM -> CH), 4 + payload bytes:

    offset  size  field
    0       1     node_id
    1       1     energy (quantized)
    2       1     ch_id
    3       1+n   payload, length prefix then n bytes (n <= 125)

Decoders consume the whole buffer; trailing bytes are an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError, MalformedPacketError

SIGNAL_PACKET_LEN = 11
CM_SLOT_COUNT = 4
CM_SLOT_EMPTY = 0xFF
MAX_CM_PAYLOAD = 125
MAX_CH_PAYLOAD = 255

ROLE_NONE = 0
ROLE_PROVER = 1
ROLE_VERIFIER = 2
ROLE_PROVER_VERIFIER = 3


def quantize_energy(energy_j: float, initial_energy_j: float) -> int:
    """Map residual energy onto one byte, 255 = full initial charge."""
    if initial_energy_j <= 0:
        raise ConfigError("initial energy must be positive to quantize")
    q = round(energy_j / initial_energy_j * 255)
    return max(0, min(255, q))


def dequantize_energy(q: int, initial_energy_j: float) -> float:
    """Midpoint inverse of quantize_energy."""
    if not 0 <= q <= 255:
        raise MalformedPacketError(f"energy byte {q} outside 0..255")
    if initial_energy_j <= 0:
        raise ConfigError("initial energy must be positive to dequantize")
    return q / 255 * initial_energy_j


def _byte(value: int, name: str) -> int:
    if not isinstance(value, int) or not 0 <= value <= 255:
        raise MalformedPacketError(f"{name} must be one byte, got {value!r}")
    return value


@dataclass(frozen=True)
class SignalPacket:
    ch_id: int
    public_key: int = 0
    private_key: int = 0
    cm_ids: tuple[int, ...] = ()
    neighbor_ch_id: int = 0

    def __post_init__(self) -> None:
        _byte(self.ch_id, "ch_id")
        _byte(self.public_key, "public_key")
        _byte(self.private_key, "private_key")
        _byte(self.neighbor_ch_id, "neighbor_ch_id")
        if len(self.cm_ids) > CM_SLOT_COUNT:
            raise MalformedPacketError(f"at most {CM_SLOT_COUNT} member slots, got {len(self.cm_ids)}")
        for cm in self.cm_ids:
            _byte(cm, "cm_id")
            if cm == CM_SLOT_EMPTY:
                raise MalformedPacketError("0xFF is the empty-slot marker, not a member id")


def encode_signal(pkt: SignalPacket) -> bytes:
    slots = list(pkt.cm_ids) + [CM_SLOT_EMPTY] * (CM_SLOT_COUNT - len(pkt.cm_ids))
    return bytes([pkt.ch_id, pkt.public_key, pkt.private_key, *slots, pkt.neighbor_ch_id, 0, 0, 0])


def decode_signal(buf: bytes) -> SignalPacket:
    if len(buf) != SIGNAL_PACKET_LEN:
        raise MalformedPacketError(f"signal packet is {SIGNAL_PACKET_LEN} bytes, got {len(buf)}")
    cm_ids = []
    for b in buf[3:7]:
        if b == CM_SLOT_EMPTY:
            continue
        cm_ids.append(b)
    return SignalPacket(buf[0], buf[1], buf[2], tuple(cm_ids), buf[7])


@dataclass(frozen=True)
class ChFrame:
    node_id: int
    energy: int
    hierarchical: bool = True
    is_ch: bool = True
    role: int = ROLE_NONE
    trap_enable: bool = False
    mine_enable: bool = False
    promisc_enable: bool = False
    next_ch_id: int = 0
    cm_id: int = 0
    cm_energy: int = 0
    cm_payload: bytes = b""
    secret_key: int = 0
    public_key: int = 0
    cm_energy2: int = 0
    mzkp_status: int = 0
    promisc_status: int = 0
    mine_status: int = 0

    def __post_init__(self) -> None:
        _byte(self.node_id, "node_id")
        _byte(self.energy, "energy")
        if not 0 <= self.role <= 3:
            raise MalformedPacketError(f"role {self.role} outside 0..3")
        _byte(self.next_ch_id, "next_ch_id")
        _byte(self.cm_id, "cm_id")
        _byte(self.cm_energy, "cm_energy")
        _byte(self.secret_key, "secret_key")
        _byte(self.public_key, "public_key")
        _byte(self.cm_energy2, "cm_energy2")
        for name in ("mzkp_status", "promisc_status", "mine_status"):
            v = getattr(self, name)
            if not 0 <= v <= 2:
                raise MalformedPacketError(f"{name} must be 0, 1 or 2, got {v}")
        if len(self.cm_payload) > MAX_CH_PAYLOAD:
            raise MalformedPacketError(f"frame payload {len(self.cm_payload)} exceeds {MAX_CH_PAYLOAD}")
        if not self.hierarchical:
            zeros = (
                self.is_ch, self.role, self.trap_enable, self.mine_enable,
                self.promisc_enable, self.next_ch_id, self.cm_id,
                self.cm_energy, self.secret_key, self.public_key,
                self.cm_energy2, self.mzkp_status, self.promisc_status,
                self.mine_status,
            )
            if any(zeros) or self.cm_payload:
                raise MalformedPacketError("flat frame carries hierarchical fields")


def _flags_byte(f: ChFrame) -> int:
    return (
        (f.hierarchical << 7)
        | (f.is_ch << 6)
        | (f.role << 4)
        | (f.trap_enable << 3)
        | (f.mine_enable << 2)
        | (f.promisc_enable << 1)
    )


def encode_ch_frame(frame: ChFrame) -> bytes:
    out = bytearray([_flags_byte(frame), frame.node_id, frame.energy, frame.next_ch_id,
                     frame.cm_id, frame.cm_energy, len(frame.cm_payload)])
    out += frame.cm_payload
    out += bytes([frame.secret_key, frame.public_key, frame.cm_energy2,
                  frame.mzkp_status, frame.promisc_status, frame.mine_status])
    return bytes(out)


def decode_ch_frame(buf: bytes) -> ChFrame:
    if len(buf) < 13:
        raise MalformedPacketError(f"frame needs at least 13 bytes, got {len(buf)}")
    flags = buf[0]
    if flags & 0x01:
        raise MalformedPacketError("reserved flag bit set")
    plen = buf[6]
    if len(buf) != 13 + plen:
        raise MalformedPacketError(f"frame length {len(buf)} does not match payload prefix {plen}")
    payload = bytes(buf[7:7 + plen])
    tail = buf[7 + plen:]
    return ChFrame(
        node_id=buf[1],
        energy=buf[2],
        hierarchical=bool(flags & 0x80),
        is_ch=bool(flags & 0x40),
        role=(flags >> 4) & 0x03,
        trap_enable=bool(flags & 0x08),
        mine_enable=bool(flags & 0x04),
        promisc_enable=bool(flags & 0x02),
        next_ch_id=buf[3],
        cm_id=buf[4],
        cm_energy=buf[5],
        cm_payload=payload,
        secret_key=tail[0],
        public_key=tail[1],
        cm_energy2=tail[2],
        mzkp_status=tail[3],
        promisc_status=tail[4],
        mine_status=tail[5],
    )


@dataclass(frozen=True)
class CmReport:
    node_id: int
    energy: int
    ch_id: int
    payload: bytes = b""

    def __post_init__(self) -> None:
        _byte(self.node_id, "node_id")
        _byte(self.energy, "energy")
        _byte(self.ch_id, "ch_id")
        if len(self.payload) > MAX_CM_PAYLOAD:
            raise MalformedPacketError(f"report payload {len(self.payload)} exceeds {MAX_CM_PAYLOAD}")


def encode_cm_report(report: CmReport) -> bytes:
    return bytes([report.node_id, report.energy, report.ch_id, len(report.payload)]) + report.payload


def decode_cm_report(buf: bytes) -> CmReport:
    if len(buf) < 4:
        raise MalformedPacketError(f"report needs at least 4 bytes, got {len(buf)}")
    plen = buf[3]
    if plen > MAX_CM_PAYLOAD:
        raise MalformedPacketError(f"report payload prefix {plen} exceeds {MAX_CM_PAYLOAD}")
    if len(buf) != 4 + plen:
        raise MalformedPacketError(f"report length {len(buf)} does not match payload prefix {plen}")
    return CmReport(buf[0], buf[1], buf[2], bytes(buf[4:]))
