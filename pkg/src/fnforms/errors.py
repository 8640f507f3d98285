"""Exception types. Each carries a short ``code`` used as the CLI error prefix."""


class FnFormsError(Exception):
    code = "error"


class ParseError(FnFormsError, ValueError):
    code = "parse"


class ChartMismatch(FnFormsError, ValueError):
    code = "chart"


class DegreeError(FnFormsError, ValueError):
    code = "degree"


class NotIdempotent(FnFormsError, ValueError):
    code = "not-idempotent"

    def __init__(self, msg="phi is not idempotent"):
        super().__init__(msg)


class NonConstantTrace(FnFormsError, ValueError):
    code = "non-constant-trace"


class NotEquivariant(FnFormsError, ValueError):
    code = "not-equivariant"


class DerivationCheckFailed(FnFormsError, ValueError):
    code = "not-a-derivation"


class ExtractionInconsistent(FnFormsError, ValueError):
    code = "extraction-inconsistent"


class NotInDerH(FnFormsError, ValueError):
    code = "not-in-der-h"


class FiberDependence(FnFormsError, ValueError):
    code = "fiber-dependence"


class UnknownSuite(FnFormsError, KeyError):
    code = "unknown-suite"

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown suite"
