class DomainError(ValueError):
    """Base class for every mathematical precondition failure.

    The CLI maps these to exit code 2; anything else is a bug.
    """

    code = "DomainError"

    def to_json(self) -> dict:
        return {"type": self.code, "message": str(self)}


def _make(name: str, doc: str = "") -> type[DomainError]:
    cls = type(name, (DomainError,), {"code": name, "__doc__": doc or None})
    return cls


DegenerateLattice = _make("DegenerateLattice", "Gram matrix has determinant zero.")
OddLattice = _make("OddLattice", "Gram matrix has an odd diagonal entry.")
ZeroScale = _make("ZeroScale")
Not2Elementary = _make("Not2Elementary")
EvenPrime = _make("EvenPrime")
UnknownName = _make("UnknownName")
UnrealizableInvariants = _make("UnrealizableInvariants")
InvariantsOnly = _make("InvariantsOnly", "Catalog entry is known only through its invariants.")
TooLarge = _make("TooLarge")
RankMismatch = _make("RankMismatch")
NotUnimodular = _make("NotUnimodular")
NotExpression = _make("NotExpression")
DegenerateType = _make("DegenerateType")
DivisionByZero = _make("DivisionByZero")
InvalidTriple = _make("InvalidTriple")
UnknownFamily = _make("UnknownFamily")
OutOfRange = _make("OutOfRange")
NotDivisible = _make("NotDivisible")
UnsupportedPrime = _make("UnsupportedPrime")
Unsupported = _make("Unsupported")
