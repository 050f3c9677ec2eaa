"""Solution-file persistence: JSON documents with bit-exact numeric payloads.

A SolutionFile captures everything needed to rebuild a SystemRecord without
re-solving: the solver spec, energies, the wavefunction payload (coefficient
cube for ions, tabulated relative orbital for the harmonic pair), density
samples, and an optional inverted single-particle block. Floats are written
with Python's shortest round-trip repr, so load(store(x)) reproduces every
number bit-exactly. Unknown top-level fields survive a load/store cycle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ContractViolation, StorageError
from .grids import RadialField, uniform_grid
from .hooke import HookeSolution, HookeSpec
from .hooke import record as hooke_record
from .helium import HeliumSolution, HeliumSpec
from .helium import record as helium_record
from .ksinv import KsSystem, ks_orbital, ks_two_electron
from .records import SystemRecord
from .states import HeliumState, HookeState

__all__ = [
    "SCHEMA_VERSION",
    "SolutionFile",
    "from_hooke",
    "from_helium",
    "with_ks",
    "to_record",
    "to_ks",
    "store",
    "load",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SolutionFile:
    """One solved system as a persistable document."""

    kind: str
    spec: dict
    energies: dict
    wavefunction: dict
    density: dict
    ks: Optional[dict] = None
    provenance: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION
    #: top-level fields this version does not understand, preserved verbatim
    extras: dict = field(default_factory=dict)


def _field_payload(f: RadialField) -> dict:
    f.grid.spacing()  # contract: only uniform grids are persisted
    return {"n": int(f.grid.n), "r_max": float(f.grid.r_max), "values": f.values.tolist()}


def _field_from_payload(payload: dict) -> RadialField:
    return RadialField(
        uniform_grid(int(payload["n"]), float(payload["r_max"])),
        np.asarray(payload["values"], dtype=float),
    )


def from_hooke(solution: HookeSolution, provenance: dict | None = None) -> SolutionFile:
    if solution.density is None:
        raise ContractViolation("cannot persist a solution without its density")
    return SolutionFile(
        kind="hooke",
        spec={"omega": solution.spec.omega, "lambda": solution.spec.lam},
        energies={
            "e_total": solution.e_total,
            "ionization": solution.ionization,
            "eps_rel": solution.eps_rel,
            "e_com": solution.e_com,
            "components": list(solution.components),
        },
        wavefunction={"relative_orbital": _field_payload(solution.rel_orbital)},
        density=_field_payload(solution.density),
        provenance=dict(provenance or {}),
    )


def from_helium(solution: HeliumSolution, provenance: dict | None = None) -> SolutionFile:
    if solution.density is None:
        raise ContractViolation("cannot persist a solution without its density")
    cube = solution.coeff_cube
    return SolutionFile(
        kind="helium",
        spec={
            "z": solution.spec.z,
            "omega_basis": solution.spec.omega_basis,
            "lambda": solution.spec.lam,
        },
        energies={
            "e_total": solution.e_total,
            "ionization": solution.ionization,
            "components": list(solution.components),
        },
        wavefunction={
            "coeff_cube_shape": list(cube.shape),
            "coeff_cube": cube.ravel().tolist(),
        },
        density=_field_payload(solution.density),
        provenance=dict(provenance or {}),
    )


def with_ks(sf: SolutionFile, ks: KsSystem) -> SolutionFile:
    """Attach the inverted single-particle block to a solution document."""
    a, b = ks._tail_coeffs  # type: ignore[attr-defined]
    block = {
        "eps_ks": ks.eps_ks,
        "e_ks_total": ks.e_ks_total,
        "tail": ks.tail,
        "valid_r_max": ks.valid_r_max,
        "tail_coeffs": [float(a), float(b)],
        "v_ks": _field_payload(ks.v_ks),
    }
    return replace(sf, ks=block)


def _rebuild_hooke(sf: SolutionFile) -> HookeSolution:
    spec = HookeSpec(float(sf.spec["omega"]), float(sf.spec["lambda"]))
    rel = _field_from_payload(sf.wavefunction["relative_orbital"])
    return HookeSolution(
        spec=spec,
        eps_rel=float(sf.energies["eps_rel"]),
        e_com=float(sf.energies["e_com"]),
        e_total=float(sf.energies["e_total"]),
        ionization=float(sf.energies["ionization"]),
        rel_orbital=rel,
        state=HookeState(spec.omega, rel.grid.nodes, rel.values),
        density=_field_from_payload(sf.density),
        components=tuple(float(x) for x in sf.energies["components"]),
    )


def _rebuild_helium(sf: SolutionFile) -> HeliumSolution:
    spec = HeliumSpec(
        float(sf.spec["z"]), int(sf.spec["omega_basis"]), float(sf.spec["lambda"])
    )
    cube = np.asarray(sf.wavefunction["coeff_cube"], dtype=float).reshape(
        sf.wavefunction["coeff_cube_shape"]
    )
    return HeliumSolution(
        spec=spec,
        coeffs=cube.ravel(),
        coeff_cube=cube,
        e_total=float(sf.energies["e_total"]),
        ionization=float(sf.energies["ionization"]),
        state=HeliumState(spec.z, cube),
        components=tuple(float(x) for x in sf.energies["components"]),
        density=_field_from_payload(sf.density),
    )


def to_record(sf: SolutionFile) -> SystemRecord:
    """Rebuild the SystemRecord without re-solving anything."""
    if sf.kind == "hooke":
        return hooke_record(_rebuild_hooke(sf))
    if sf.kind == "helium":
        return helium_record(_rebuild_helium(sf))
    raise StorageError(f"unknown solution kind {sf.kind!r}")


def to_ks(sf: SolutionFile) -> KsSystem:
    """Rebuild the inverted single-particle system from the stored block."""
    if sf.ks is None:
        raise ContractViolation("solution file carries no inverted-system block")
    density = _field_from_payload(sf.density)
    v_ks = _field_from_payload(sf.ks["v_ks"])
    object.__setattr__(v_ks, "_tail_coeffs", tuple(sf.ks["tail_coeffs"]))
    return ks_two_electron(
        orbital=ks_orbital(density),
        v_ks=v_ks,
        eps_ks=float(sf.ks["eps_ks"]),
        density=density,
        valid_r_max=float(sf.ks["valid_r_max"]),
        tail=str(sf.ks["tail"]),
    )


_KNOWN_FIELDS = (
    "schema_version",
    "kind",
    "spec",
    "energies",
    "wavefunction",
    "density",
    "ks",
    "provenance",
)


def store(sf: SolutionFile, path) -> None:
    doc = {
        "schema_version": sf.schema_version,
        "kind": sf.kind,
        "spec": sf.spec,
        "energies": sf.energies,
        "wavefunction": sf.wavefunction,
        "density": sf.density,
        "provenance": sf.provenance,
    }
    if sf.ks is not None:
        doc["ks"] = sf.ks
    doc.update(sf.extras)
    try:
        Path(path).write_text(
            json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc


def load(path) -> SolutionFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StorageError(f"corrupt solution file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise StorageError(f"{path} is not a solution file (no schema_version)")
    version = doc["schema_version"]
    if version != SCHEMA_VERSION:
        raise StorageError(
            f"{path} has schema_version {version}; this build reads only "
            f"{SCHEMA_VERSION} and has no migration for it"
        )
    for name in ("kind", "spec", "energies", "wavefunction", "density"):
        if name not in doc:
            raise StorageError(f"{path} is missing the {name!r} field")
    extras = {k: v for k, v in doc.items() if k not in _KNOWN_FIELDS}
    return SolutionFile(
        kind=doc["kind"],
        spec=doc["spec"],
        energies=doc["energies"],
        wavefunction=doc["wavefunction"],
        density=doc["density"],
        ks=doc.get("ks"),
        provenance=doc.get("provenance", {}),
        schema_version=version,
        extras=extras,
    )
