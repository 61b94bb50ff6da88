"""Sparse Fock-space linear optics used as a brute-force oracle."""

from .elements import OpticalElement, apply_element, bd, bs, cpbs, hwp, pbs, phase, rename
from .presets import build_preset, preset_names
from .protocol import (Channel, OutputRule, ProtocolSpec, Select, bitflip_channel, entanglement_swap_stage,
                       measure_polarization, normalized, pair_bell_weights, postselect, run_protocol,
                       run_protocol_detailed, strip_modes)
from .rules import AnyOf, Everything, Not, Pattern, PostselectionRule, nothing, one_each
from .sources import SourceSpec, spdc_pair_source, spdc_state
from .state import (ConfigurationError, Mixture, ModeLabel, OpticalState, OpticsError, TruncationError,
                    key_counts, make_key)
from .verify import verify_against_analytic

__all__ = [
    "OpticalElement", "apply_element", "bd", "bs", "cpbs", "hwp", "pbs", "phase", "rename",
    "build_preset", "preset_names", "Channel", "OutputRule", "ProtocolSpec", "Select", "bitflip_channel",
    "entanglement_swap_stage", "measure_polarization", "normalized", "pair_bell_weights", "postselect",
    "run_protocol", "run_protocol_detailed", "strip_modes", "AnyOf", "Everything", "Not", "Pattern",
    "PostselectionRule", "nothing", "one_each", "SourceSpec", "spdc_pair_source", "spdc_state",
    "ConfigurationError", "Mixture", "ModeLabel", "OpticalState", "OpticsError", "TruncationError",
    "key_counts", "make_key", "verify_against_analytic",
]
