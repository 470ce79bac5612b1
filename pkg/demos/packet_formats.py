"""
Wire formats for the three packet types
=======================================

Signals carry cluster control, member reports carry readings up to the
head, frames carry the aggregate toward the sink. All three encode to
fixed layouts with one-byte fields; energies ride along quantized to
a 0..255 scale against the node's initial charge.
"""

from esrpsim import (
    ChFrame,
    CmReport,
    MalformedPacketError,
    SignalPacket,
    decode_ch_frame,
    decode_signal,
    encode_ch_frame,
    encode_cm_report,
    encode_signal,
    quantize_energy,
)

# a formation signal: head id, key pair, the first four member slots
sig = SignalPacket(ch_id=7, public_key=167, private_key=23, cm_ids=(3, 9, 12))
wire = encode_signal(sig)
print("signal bytes :", wire.hex(" "))
print("decodes back :", decode_signal(wire))
print()

# unused member slots pad with 0xff, which is why 0xff can never be a
# member id in the slot list

# a member report with a 2-byte reading
rep = CmReport(node_id=9, energy=quantize_energy(1.48, 2.0), ch_id=7, payload=b"\x2a\x17")
print("report bytes :", encode_cm_report(rep).hex(" "))
print()

# the aggregate frame a head sends upstream; the flags byte packs the
# hierarchical/is_ch bits, the security role and the three gate enables
frame = ChFrame(
    node_id=7,
    energy=quantize_energy(1.9, 2.0),
    role=3,
    trap_enable=True,
    mine_enable=True,
    promisc_enable=True,
    next_ch_id=2,
    cm_id=9,
    cm_energy=189,
    cm_payload=b"\x2a\x17\x05",
    secret_key=23,
    public_key=167,
    cm_energy2=101,
)
fw = encode_ch_frame(frame)
print("frame bytes  :", fw.hex(" "))
print("round trips  :", decode_ch_frame(fw) == frame)
print()

# a flat frame (a sensor reporting straight to the sink) must zero every
# hierarchical field; the codec enforces that on both paths
try:
    ChFrame(node_id=4, energy=80, hierarchical=False, is_ch=True)
except MalformedPacketError as exc:
    print("flat rule    :", exc)

# truncated buffers are rejected rather than misread
try:
    decode_signal(wire[:5])
except MalformedPacketError as exc:
    print("short buffer :", exc)
