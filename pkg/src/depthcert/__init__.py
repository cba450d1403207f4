"""Energy-restricted bounds for distributed state discrimination and
entanglement-depth certification."""
from .bounds import (PartitionSpec, depth_bound_table, g_bounds, nu_crit, p_ent,
                     p_sd, p_sep, partition_bound, partitions)
from .certify import CertVerdict, InconsistentObservation, certify, sweep

__all__ = [
    "PartitionSpec", "depth_bound_table", "g_bounds", "nu_crit", "p_ent", "p_sd",
    "p_sep", "partition_bound", "partitions", "CertVerdict",
    "InconsistentObservation", "certify", "sweep",
]
