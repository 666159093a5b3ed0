"""Exception types raised across the package."""


class VMQKDError(Exception):
    """Base class for every error raised by vmqkd."""


# field arithmetic
class ModulusMismatch(VMQKDError, ValueError):
    pass


class ZeroInverse(VMQKDError, ZeroDivisionError):
    pass


class DuplicateNode(VMQKDError, ValueError):
    pass


class NotPrime(VMQKDError, ValueError):
    pass


# qudit algebra
class DimensionMismatch(VMQKDError, ValueError):
    pass


class ComputationalBasisUnsupported(VMQKDError, ValueError):
    pass


# secret sharing
class BadThreshold(VMQKDError, ValueError):
    pass


class BadIdentity(VMQKDError, ValueError):
    pass


class SelfPeer(VMQKDError, ValueError):
    pass


class NotInActiveSet(VMQKDError, ValueError):
    pass


class BadActiveSize(VMQKDError, ValueError):
    pass


class BadComponentCount(VMQKDError, ValueError):
    pass


class VerificationFailed(VMQKDError):
    """A Lagrange component failed dealer verification.

    ``owner`` is the identity of the participant that supplied it.
    """

    def __init__(self, owner, message=None):
        self.owner = owner
        super().__init__(message or f"component from participant {owner} failed verification")


# repetition code
class LengthMismatch(VMQKDError, ValueError):
    pass


class VerifierUnavailable(VMQKDError):
    pass


# channel
class ShapeMismatch(VMQKDError, ValueError):
    pass


class TimingViolation(VMQKDError):
    def __init__(self, arrival, expected, window):
        self.arrival = arrival
        self.expected = expected
        self.window = window
        super().__init__(
            f"frame arrived at tick {arrival}, expected {expected} +/- {window}"
        )


class NoAdversary(VMQKDError, ValueError):
    pass


# protocol engine
class AuthReject(VMQKDError):
    pass


class DecryptMismatch(VMQKDError):
    pass


class MaxRoundsExceeded(VMQKDError):
    def __init__(self, rounds, residual):
        self.rounds = rounds
        self.residual = residual
        super().__init__(f"{len(residual)} key elements still missing after {rounds} rounds")


class HopFailed(VMQKDError):
    """A chain hop failed; ``hop`` is 1-based (hop 1 is Alice -> Bob_1)."""

    def __init__(self, hop, cause):
        self.hop = hop
        self.cause = cause
        super().__init__(f"hop {hop} failed: {cause!r}")


class IncompleteRun(VMQKDError):
    pass


class ConfigError(VMQKDError, ValueError):
    pass
