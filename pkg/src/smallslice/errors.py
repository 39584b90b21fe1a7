"""Failure modes that are contracts, not bugs.

Domain errors (bad arguments) raise plain ValueError everywhere; the classes
here mark runs that were set up correctly but could not deliver a certified
result, so callers can distinguish "wrong input" from "construction failed".
"""


class NetConstructionError(RuntimeError):
    """Net could not be built within the configured budget or size ceiling."""


class NetCoverageError(NetConstructionError):
    """Probing found a gap >= delta: the net is not certified and is not returned."""


class PointSearchError(RuntimeError):
    """No point sample met the averaging threshold within the retry budget."""


class MassContractError(RuntimeError):
    """The mass of the dilated body fell below the guaranteed lower bound."""


class UndersampledError(RuntimeError):
    """Monte Carlo hit rate or relative error too poor to report honestly."""


class NormalizationError(RuntimeError):
    """A rescaling self-check (unit volume or unit mass) fell outside tolerance."""


class MembershipSolverError(RuntimeError):
    """The feasibility solver did not converge (distinct from 'not contained')."""
