"""secrecy: numerics for one-shot private communication over quantum wiretap channels.

Layers, bottom up:

* :mod:`secrecy.quantum`   states, channels, fidelities, von Neumann entropies
* :mod:`secrecy.sdp`       a dense primal-dual interior-point SDP solver
* :mod:`secrecy.entropy`   smooth conditional min/max entropies via SDPs
* :mod:`secrecy.symmetry`  permutation-symmetric reduction for tensor powers
* :mod:`secrecy.lemmas`    numerical checks of one-shot entropy inequalities
* :mod:`secrecy.channels`  cqq wiretap channels and degradability testing
* :mod:`secrecy.capacity`  private capacity of degraded wiretap channels
* :mod:`secrecy.codes`     wiretap codes, their figures of merit, brute-force search
* :mod:`secrecy.converse`  one-shot and finite-blocklength converse bounds
* :mod:`secrecy.io`        JSON serialization of channels and codes
* :mod:`secrecy.cli`       command-line entry points
"""

__version__ = "0.1.0"
