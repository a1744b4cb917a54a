"""Fixed-delay streaming over packet-erasure channels with unreliable feedback.

Thin wrapper over the C++ core: closed-form exponents and achievable
regions, the Pascal tail bound, curve sweeps, and the seeded scheme
simulator.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
