"""Exception types raised across the package."""


class S6TwistorError(Exception):
    pass


class LeibnizViolation(S6TwistorError, ArithmeticError):
    """A constructed derivation fails the Leibniz rule (a convention bug)."""


class DegenerateDirection(S6TwistorError, ValueError):
    pass


class AntipodalTransport(S6TwistorError, ValueError):
    pass


class NearPole(S6TwistorError, ValueError):
    pass


class DegreeOverflow(S6TwistorError, ValueError):
    pass


class DegenerateVolume(S6TwistorError, ValueError):
    pass


class Unstable(S6TwistorError, ValueError):
    """A 3-form with tau >= 0 where a stable form was required."""


class OrientationMismatch(S6TwistorError, ValueError):
    """A fiber operator inducing the non-standard orientation (not a point of Z+)."""


class NotThroughPoint(S6TwistorError, ValueError):
    """A section does not pass through the given twistor point."""
