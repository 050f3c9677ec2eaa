"""SystemRecord: the common handle metrics and scans operate on."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .grids import RadialField
from .states import CorrelatedState

__all__ = ["SystemRecord"]


@dataclass(frozen=True)
class SystemRecord:
    """One solved system: potential spec, energies, density, and state handle.

    kind is 'hooke' or 'helium' for interacting systems and
    'hooke-ks' / 'helium-ks' for the non-interacting counterparts.
    """

    kind: str
    label: str
    params: dict
    e_total: float
    ionization: float
    density: RadialField
    state: CorrelatedState
    v_ext: Callable[[object], object]
    #: interaction scale multiplying 1/|r1 - r2| (0 for non-interacting systems)
    lam: float
    #: (kinetic, electron-electron, external potential) expectation values
    components: Optional[tuple[float, float, float]] = None
    #: ground-state energy of the one-electron remnant after ionization
    e_remnant: Optional[float] = None

    @property
    def n_particles(self) -> int:
        return 2
