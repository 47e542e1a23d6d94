"""Scrambler-based key distribution over lossy wireless links."""
from .scrambler import (GA_SPEC, GA_VARIANT, GB_VARIANT, PROPOSED_SPEC, PROPOSED_VARIANT, PROPOSED7_VARIANT,
                        SWAPPED7_VARIANT, DegenerateSeed, Family, LfsrSpec, ScramblerVariant, get_variant)
from .channel import (DEFAULT_CHAIN, ChannelModel, ProtocolParams, ThresholdUnreachable, block_success_probability,
                      bootstrap_time, packet_error_rate, secure_radii)
from .avalanche import error_distribution, sweep_single_error, uniformity_test
from .protocol import decode_key_block, encode_key_block, leakage_report, simulate_bootstrap
from .burstiness import beta, empirical_cpdf, generate_trace, parse_trace

__version__ = "0.1.0"
