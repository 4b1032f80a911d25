"""Exception types shared across the toolkit."""


class SentaurError(Exception):
    """Base class for all toolkit errors."""


class RtlSyntaxError(SentaurError):
    """Input text does not match the supported grammar."""

    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"{line}:{col}: expected {expected}")


class UnsupportedConstruct(SentaurError):
    """Recognized Verilog construct that is outside the supported subset."""

    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: unsupported construct '{name}'")


class MultiDriver(SentaurError):
    """A net is driven by more than one construct."""

    def __init__(self, net: str, spans):
        self.net = net
        self.spans = list(spans)
        where = ", ".join(f"line {s}" for s in self.spans)
        super().__init__(f"net '{net}' has multiple drivers ({where})")


class UnknownTop(SentaurError):
    pass


class RecursiveInstantiation(SentaurError):
    pass


class UnresolvedInstance(SentaurError):
    pass


class CombinationalCycle(SentaurError):
    def __init__(self, nets):
        self.nets = list(nets)
        super().__init__(f"combinational cycle through {' -> '.join(self.nets)}")


class UnknownInput(SentaurError):
    pass


class UnknownNet(SentaurError):
    pass


class WidthNotOne(SentaurError):
    pass


class LengthMismatch(SentaurError):
    pass


class WidthMismatch(SentaurError):
    pass


class NameCollision(SentaurError):
    pass


class UnknownModule(SentaurError):
    pass


class NoPath(SentaurError):
    pass


class TargetNotOutput(SentaurError):
    pass


class LeakPortNameCollision(NameCollision):
    pass


class HostUnsupported(SentaurError):
    pass


class CannotInferHoldValue(SentaurError):
    pass


class InvalidSpec(SentaurError):
    """Trigger/payload/stimulus parameters violate their invariants."""


class TransportError(SentaurError):
    """Transient network failure talking to the LLM backend."""


class AuthError(SentaurError):
    """Backend rejected the credentials; never retried."""


class RateLimited(TransportError):
    def __init__(self, retry_after: float = 0.0):
        self.retry_after = retry_after
        super().__init__(f"rate limited (retry after {retry_after}s)")


class MalformedResponse(SentaurError):
    pass


class NoCodeFound(SentaurError):
    pass
