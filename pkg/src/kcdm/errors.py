"""Typed error taxonomy shared by every module.

All library failures derive from KCDMError so callers (and the CLI exit-code
mapping) can branch on failure class without string matching.
"""


class KCDMError(Exception):
    """Base class for all kcdm errors."""


class InvalidKeyMaterial(KCDMError):
    """Key or nonce has the wrong length or is not valid hex."""


class StreamExhausted(KCDMError):
    """The keyed stream's 64-bit block counter overflowed."""


class InvalidRange(KCDMError):
    """Malformed uniform bounds or a zero modulus for index draws."""


class InvalidDimension(KCDMError):
    """Node count must be at least 1."""


class InvalidGraphSpec(KCDMError):
    """Graph family parameters violate their constraints."""


class DomainViolation(KCDMError):
    """A state left its map's invariant domain; indicates a folding bug."""


class NumericalDivergence(KCDMError):
    """A non-finite state appeared during simulation."""

    def __init__(self, message, node=None, step=None):
        super().__init__(message)
        self.node = node
        self.step = step


class SynchronizationWarning(UserWarning):
    """Perturbed and reference trajectories collapsed onto each other."""


class IdenticalInputs(KCDMError):
    """Avalanche comparison needs two distinct (key, nonce) inputs."""


class ChaosVerificationFailed(KCDMError):
    """Resolved system failed the positive-Lyapunov gate."""

    def __init__(self, lambda_hat):
        super().__init__(f"lyapunov estimate not positive: {lambda_hat}")
        self.lambda_hat = lambda_hat


class InvalidShape(KCDMError):
    """Tensor shape has no elements."""


class InvalidInput(KCDMError):
    """Tensor contains non-finite values."""


class InvalidOptions(KCDMError):
    """Pinned cipher options violate parameter constraints."""


class ConfigMismatch(KCDMError):
    """Container fingerprint does not match its own options block."""


class UnsupportedFormat(KCDMError):
    """File does not start with a known magic."""


class CorruptFile(KCDMError):
    """File is truncated or internally inconsistent."""


class UnsupportedVersion(KCDMError):
    """File version is newer than this library understands."""
