"""Exception hierarchy shared by the automaton models, the decision engine and the CLI."""


class QFAError(Exception):
    """Base class for every error raised by this package."""


class InvalidShape(QFAError, ValueError):
    pass


class ValidationError(QFAError, ValueError):
    """An automaton violates one of its structural invariants."""


class NonUnitary(ValidationError):
    def __init__(self, symbol, deviation=None):
        self.symbol = symbol
        self.deviation = deviation
        msg = f"transition matrix for {symbol!r} is not unitary"
        if deviation is not None:
            msg += f" (||U^H U - I||_F = {deviation:.3g})"
        super().__init__(msg)


class InitialNotUnit(ValidationError):
    pass


class OverlappingPartition(ValidationError):
    pass


class MissingEndmarkMatrix(ValidationError):
    pass


class MissingEndmarker(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class IncompleteKraus(ValidationError):
    def __init__(self, symbol, deviation=None):
        self.symbol = symbol
        self.deviation = deviation
        msg = f"Kraus operators for {symbol!r} do not satisfy sum M^H M = I"
        if deviation is not None:
            msg += f" (deviation {deviation:.3g})"
        super().__init__(msg)


class UnknownSymbol(QFAError, KeyError):
    def __init__(self, symbol):
        self.symbol = symbol
        super().__init__(symbol)

    def __str__(self):
        return f"symbol {self.symbol!r} is not in the input alphabet"


class AlphabetMismatch(QFAError, ValueError):
    pass


class EmptyWord(QFAError, ValueError):
    pass


class BoundExceeded(QFAError, RuntimeError):
    """The closure basis outgrew the proven dimension bound.

    This can only come from numerical rank inflation; retry with a larger
    ``tol_span``.
    """


class NoMismatch(QFAError, ValueError):
    pass


class ParseError(QFAError, ValueError):
    pass
