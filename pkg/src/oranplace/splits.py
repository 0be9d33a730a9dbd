"""Functional split catalog.

Four split levels between the DU and CU are supported, from most
distributed (1) to fully centralized (4). Each level fixes three things:
the cross-haul load placed on the DU-CU path as an affine function of the
demanded rate, the one-way latency bound on that path, and the per-Mbps
compute coefficients of the virtual DU and CU. Split 4 collapses the DU
into the radio side, carries a constant cross-haul load, and is only
available over a direct RH-RC link.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np


class SplitId(IntEnum):
    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4

    @property
    def index(self) -> int:
        """Zero-based position in catalog arrays."""
        return int(self) - 1


@dataclass(frozen=True)
class SplitSpec:
    """Static parameters of one split level.

    cross-haul load (Gbps) = load_slope * demand_gbps + load_offset_gbps.
    Compute coefficients are CCs per Mbps of demanded rate. The fronthaul
    figures describe the low-layer segment below the DU and are recorded for
    reference only; they are not constrained anywhere.
    """

    id: SplitId
    hls_option: str
    load_slope: float
    load_offset_gbps: float
    crosshaul_delay_bound_ms: float
    du_coeff: float
    cu_coeff: float
    requires_direct: bool
    fronthaul_load_gbps: float | None
    fronthaul_delay_ms: float | None

    def crosshaul_load(self, load_mbps: float) -> float:
        if load_mbps < 0.0:
            raise ValueError(f"demanded load must be nonnegative, got {load_mbps}")
        return self.load_slope * (load_mbps / 1000.0) + self.load_offset_gbps

    def compute_demand(self, load_mbps: float) -> tuple[float, float]:
        """(DU, CU) compute demand in CCs for a demanded rate in Mbps."""
        if load_mbps < 0.0:
            raise ValueError(f"demanded load must be nonnegative, got {load_mbps}")
        return self.du_coeff * load_mbps, self.cu_coeff * load_mbps


def make_catalog(
    load_slopes: tuple[float, ...] = (1.0, 1.0, 1.02, 0.0),
    load_offsets_gbps: tuple[float, ...] = (0.0, 0.0, 0.5, 157.3),
    delay_bounds_ms: tuple[float, ...] = (10.0, 1.0, 0.25, 0.25),
    du_coeffs: tuple[float, ...] = (0.05, 0.04, 0.00325, 0.0),
    cu_coeffs: tuple[float, ...] = (0.0, 0.001, 0.00175, 0.05),
) -> tuple[SplitSpec, ...]:
    """Build the four-level catalog, optionally with overridden constants."""
    arrays = (load_slopes, load_offsets_gbps, delay_bounds_ms, du_coeffs, cu_coeffs)
    if any(len(a) != 4 for a in arrays):
        raise ValueError("catalog arrays must have exactly 4 entries")
    hls = ("O2", "O4", "O6", "O8")
    specs = []
    for i, sid in enumerate(SplitId):
        specs.append(
            SplitSpec(
                id=sid,
                hls_option=hls[i],
                load_slope=load_slopes[i],
                load_offset_gbps=load_offsets_gbps[i],
                crosshaul_delay_bound_ms=delay_bounds_ms[i],
                du_coeff=du_coeffs[i],
                cu_coeff=cu_coeffs[i],
                requires_direct=(sid is SplitId.S4),
                fronthaul_load_gbps=None if sid is SplitId.S4 else 10.01,
                fronthaul_delay_ms=None if sid is SplitId.S4 else 0.25,
            )
        )
    return tuple(specs)


DEFAULT_CATALOG: tuple[SplitSpec, ...] = make_catalog()

Catalog = tuple[SplitSpec, ...]


def crosshaul_load(split: SplitId, load_mbps: float, catalog: Catalog = DEFAULT_CATALOG) -> float:
    return catalog[SplitId(split).index].crosshaul_load(load_mbps)


def compute_demand(
    split: SplitId, load_mbps: float, catalog: Catalog = DEFAULT_CATALOG
) -> tuple[float, float]:
    return catalog[SplitId(split).index].compute_demand(load_mbps)


def catalog_arrays(catalog: Catalog = DEFAULT_CATALOG) -> dict[str, np.ndarray]:
    """Catalog constants as aligned float arrays indexed by SplitId.index."""
    return {
        "load_slope": np.array([s.load_slope for s in catalog]),
        "load_offset_gbps": np.array([s.load_offset_gbps for s in catalog]),
        "delay_bound_ms": np.array([s.crosshaul_delay_bound_ms for s in catalog]),
        "du_coeff": np.array([s.du_coeff for s in catalog]),
        "cu_coeff": np.array([s.cu_coeff for s in catalog]),
        "requires_direct": np.array([s.requires_direct for s in catalog]),
    }


@dataclass(frozen=True)
class CostParams:
    """Prices and weights of the deployment cost terms.

    DU compute is priced higher than CU compute to reflect edge versus
    cloud resource cost; reconfiguration and routing weights default to 1.
    """

    du_price: float = 2.0
    cu_price: float = 1.0
    reconfig_weight: float = 1.0
    routing_weight: float = 1.0

    def validate(self) -> None:
        for name in ("du_price", "cu_price", "reconfig_weight", "routing_weight"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
