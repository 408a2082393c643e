"""Exception and warning types shared across the toolkit."""


class MedError(Exception):
    """Base class for all toolkit errors."""


class NearLinearDependence(MedError):
    """Ensemble (or Gram matrix) is too close to linear dependence to solve."""


class NotUnitary(MedError):
    """A matrix that must be unitary (or an orthonormal basis) is not."""


class NotStationary(MedError):
    """A certification step requires a stationary measurement but got none."""


class ResidualTooLarge(MedError):
    """A candidate solution violates its defining matrix equation."""


class SingularJacobian(MedError):
    """The tangent linear system is numerically singular; the continuation
    run has left the region where the solution is well defined."""


class PositivityLost(MedError):
    """The square-root factor lost positive definiteness mid-run, which
    cannot happen on a trajectory of valid Gram matrices; fatal diagnostic."""


class NotCertified(MedError):
    """A starting state handed to a continuation segment is not a certified
    solution at its starting Gram matrix."""


class NotRealRoot(MedError):
    """A complex stationary root cannot be converted to a measurement."""


class UnitarityLost(MedError):
    """A reconstructed measurement basis is too far from orthonormal."""


class NoConvergence(MedError):
    """An iterative search exhausted its budget without converging."""


class AuditFailure(MedError):
    """One or more geometric optimality identities failed.

    The failing report is attached as the ``report`` attribute.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SchemaError(MedError):
    """An input file does not match the expected JSON schema."""


class RootCountAnomaly(UserWarning):
    """Fewer stationary roots were found than the degree bound predicts."""
