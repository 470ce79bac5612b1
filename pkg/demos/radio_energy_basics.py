"""
First-order radio energy arithmetic
===================================

Every charge in the simulator reduces to a handful of closed forms.
This script evaluates them at the standard operating points so the
numbers can be eyeballed against the tables they came from.
"""

from esrpsim import (
    EnergyParams,
    cpu_energy,
    fleet_energy_budget,
    mem_read_energy,
    mem_write_energy,
    node_message_energy,
    rx_energy,
    tx_energy,
)

P = EnergyParams()
uJ = 1e-6

# transmit cost has a distance-squared amplifier term on top of the
# electronics term, receive cost has the electronics term only
print("tx 1000 bits over 50 m :", tx_energy(1000, 50, P) / uJ, "uJ")
print("tx   64 bits over 50 m :", tx_energy(64, 50, P) / uJ, "uJ")
print("rx 1000 bits           :", rx_energy(1000, P) / uJ, "uJ")
print("rx   64 bits           :", rx_energy(64, P) / uJ, "uJ")

# processing and key storage are per-bit flat rates
print("cpu 1000 bits          :", cpu_energy(1000, P) / uJ, "uJ")
print("mem write 96-bit key   :", mem_write_energy(96, P) / uJ, "uJ")
print("mem read  96-bit key   :", mem_read_energy(96, P) / uJ, "uJ")

# one full message cycle: tx + rx for both packet sizes, the cpu and
# key traffic that goes with them, and a second of sensing draw
cycle = node_message_energy(P)
print()
print("one message cycle      :", round(cycle / uJ, 3), "uJ")

# scaled to a fleet, the per-node rate is quantized to 0.1 mJ/s first;
# 100 nodes for an hour then come out at a round figure
budget = fleet_energy_budget(P, n_nodes=100, horizon_s=3600)
print("100 nodes, 3600 s      :", budget, "J")
