"""Verifiable multi-party QKD over mutually unbiased bases with repetition codes."""

from .channel import ChannelConfig, InterceptResend
from .engine import Engine, ProtocolConfig, efficiency, run_chain
from .field import BiPoly, FieldElement, PrimeModulus, UniPoly
from .rng import make_rng
from .transcript import Transcript

__all__ = [
    "BiPoly",
    "ChannelConfig",
    "Engine",
    "FieldElement",
    "InterceptResend",
    "PrimeModulus",
    "ProtocolConfig",
    "Transcript",
    "UniPoly",
    "efficiency",
    "make_rng",
    "run_chain",
]
