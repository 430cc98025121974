"""Key-conditioned chaotic graph dynamics for masking real-valued tensors.

A 32-byte key and 16-byte public nonce deterministically instantiate a
coupled chaotic map system on a random graph; its trajectory becomes an
additive mask for encrypting, decrypting and authenticating tensors.
"""

from .cipher import (
    CipherOptions,
    ResolvedSystem,
    decrypt,
    decrypt_from_container,
    encrypt,
    encrypt_to_container,
    generate_mask,
    resolve_config,
)
from .diagnostics import AvalancheReport, LyapunovReport, avalanche, estimate_lyapunov
from .dynamics import MapKind, MapParams, SystemConfig, coupled_step, init_state, map_step, simulate
from .errors import (
    ChaosVerificationFailed,
    ConfigMismatch,
    CorruptFile,
    DomainViolation,
    IdenticalInputs,
    InvalidDimension,
    InvalidGraphSpec,
    InvalidInput,
    InvalidKeyMaterial,
    InvalidOptions,
    InvalidRange,
    InvalidShape,
    KCDMError,
    NumericalDivergence,
    StreamExhausted,
    SynchronizationWarning,
    UnsupportedFormat,
    UnsupportedVersion,
)
from .graphgen import GraphSpec, sample_er, sample_weights, sample_ws
from .keystream import KeyedStream, MasterKey, Nonce, SubKeys, derive_subkeys

__version__ = "0.1.0"
