"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to.
"""

EXIT_DOMAIN = 10
EXIT_BREAKDOWN = 11
EXIT_IO = 12
EXIT_NO_SOLUTION = 13
EXIT_CHECK_FAILED = 20


class CmcError(Exception):
    exit_code = EXIT_DOMAIN


class AntipodalPoints(CmcError):
    pass


class DegenerateBase(CmcError):
    pass


class OutOfDomain(CmcError):
    pass


class DomainViolation(CmcError):
    """A sample left the validity range of the comparison function."""

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class NonPositiveU(CmcError):
    pass


class NonPositiveU0(CmcError):
    pass


class NonPositiveW(CmcError):
    pass


class InconsistentMeanCurvature(CmcError):
    pass


class AxisCollision(CmcError):
    pass


class DegenerateMetric(CmcError):
    pass


class BranchMismatch(CmcError):
    pass


class InvalidGeometry(CmcError):
    pass


class NoSuchCap(CmcError):
    pass


class Breakdown(CmcError):
    """u fell below the floor; principal curvature blows up at ``s_star``."""

    exit_code = EXIT_BREAKDOWN

    def __init__(self, s_star, solution=None):
        super().__init__(f"u collapsed at s={s_star:.6g}")
        self.s_star = s_star
        self.solution = solution


class NoContact(CmcError):
    exit_code = EXIT_NO_SOLUTION


class NoBracket(CmcError):
    exit_code = EXIT_NO_SOLUTION
