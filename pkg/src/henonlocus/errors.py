"""Exception types shared across the package."""


class LocusError(Exception):
    """Base class for all henonlocus errors."""


class BranchFailure(LocusError):
    """A telescopic log factor left the principal branch domain (|s| >= 1)."""


class DegenerateJacobian(LocusError):
    """Operation requires a != 0 (the map is not invertible at a = 0)."""


class DepthTooLarge(LocusError):
    """Requested preimage depth exceeds the configured cap."""


class InfeasibleConstants(LocusError):
    """No admissible level r exists; the base polynomial is misconfigured."""


class OutsideDomain(LocusError):
    """Point is outside the domain of the requested coordinate."""


class NeverEntersVPlus(LocusError):
    """Forward orbit did not reach the outer region within the depth cap."""


class NeverEntersVMinus(LocusError):
    """Backward orbit did not reach the outer region within the depth cap."""


class OnDegenerateParabola(LocusError):
    """Degenerate backward coordinate undefined on p(y) = x."""


class NoConvergence(LocusError):
    """Newton iteration failed to reach the requested tolerance."""


class IllConditioned(LocusError):
    """Directional derivative below the conditioning floor."""


class SingularPoint(LocusError):
    """Gradient of the tangency function vanished on a trace."""


class StepCollapse(LocusError):
    """Continuation step shrank below the minimum step size."""


class NoComponentFound(LocusError):
    """No locus component found where one was requested."""


class GluingMismatch(LocusError):
    """A boundary circle failed to match its partner under the dynamics."""


class IncompleteTrace(LocusError):
    """A boundary trace did not close into a circle."""


class ConfigError(LocusError):
    """Malformed configuration file, key or command-line value."""
