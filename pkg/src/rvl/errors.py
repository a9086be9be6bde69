class RvlError(Exception):
    """Base error. `exit_code` is what the CLI returns when it surfaces."""

    exit_code: int = 1


class ArityError(RvlError, ValueError):
    exit_code = 2


class OrderError(RvlError, ValueError):
    exit_code = 2


class CoefficientIndexError(RvlError, IndexError):
    exit_code = 2


class ParseError(RvlError, ValueError):
    exit_code = 2

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbolError(ParseError):
    def __init__(self, name: str, position: int):
        super().__init__(f"Unknown symbol '{name}'", position)
        self.name = name


class NotMonicError(RvlError, ValueError):
    exit_code = 2


class NonlocalDependencyError(RvlError, ValueError):
    exit_code = 2


class PolicyRefusal(RvlError):
    exit_code = 3


class NotSelfAdjointError(PolicyRefusal, ValueError):
    pass


class VerificationFailure(RvlError):
    exit_code = 4


class BlowUpError(RvlError):
    exit_code = 5


class UnboundSymbolError(RvlError, ValueError):
    exit_code = 2

    def __init__(self, name: str):
        super().__init__(f"Symbol '{name}' is not bound")
        self.name = name


class EndpointSupportError(RvlError, ValueError):
    exit_code = 2


class WindowEmptyError(RvlError, ValueError):
    exit_code = 2


class NotLinearError(RvlError, ValueError):
    exit_code = 2
