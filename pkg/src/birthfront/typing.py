"""Custom types for birthfront."""
from typing import Any, Dict, Sequence, Tuple

from typing_extensions import Literal

# A lattice site
Site = int

# Number of particles at a site, in ``[0, N]``
Occupancy = int

# Weights of a kernel for offsets ``-r, ..., r``
Weights = Sequence[float]

# A snapshot of the seen-from-tip chain, tip first
TipValues = Tuple[int, ...]

# Which front is being analysed
Side = Literal["right", "left"]

# A parsed ``model:`` section of the experiment configuration
ModelSpec = Dict[str, Any]
