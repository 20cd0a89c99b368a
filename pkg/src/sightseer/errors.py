"""Exception types shared across the package."""


class SightseerError(Exception):
    """Base class for all package errors."""


# driver
class ConnectionFailed(SightseerError):
    pass


class NavigationFailed(SightseerError):
    pass


class SessionLost(SightseerError):
    pass


class StaleElement(SightseerError):
    pass


class NotInteractable(SightseerError):
    pass


# dom-context
class ParseError(SightseerError):
    pass


class NoCandidates(SightseerError):
    pass


# annotator
class RectOutOfBounds(SightseerError):
    pass


# model-client
class BackendUnavailable(SightseerError):
    pass


class VisionUnsupported(SightseerError):
    pass


class QueryTimeout(SightseerError):
    pass


class ReplayMiss(SightseerError):
    pass


# bandit
class EmptyCandidates(SightseerError):
    pass


# explorer
class DriverLost(SightseerError):
    pass


class StalledRun(SightseerError):
    """The loop cannot make progress (no actionable elements even after recovery)."""
