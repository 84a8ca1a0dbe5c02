"""Cavity-mediated many-body gates on spin lattices: exact fidelity formulas,
brute-force oracles, and the [[n^3,1,n]] compass subsystem code.

Subpackages
-----------
- ``sectors``     angular momentum sector bookkeeping and multiplicities
- ``lindblad``    closed-form decay kernels + dense/master-equation and
                  Monte Carlo trajectory oracles
- ``fidelity``    process fidelity from coefficient tables, F_ave conversion
- ``photon_gate`` single-photon teleported gate under cavity decay
- ``detector``    photodetector-monitored repeat-until-success protocol
- ``geo_phase``   geometric phase gate, displacement algebra, dephasing
- ``noise``       collective / independent depolarization channels
- ``compass``     GF(2) symplectic compass-code stabilizers and decoding
- ``cli``         ``sim`` command line front end
"""

__version__ = "0.1.0"
