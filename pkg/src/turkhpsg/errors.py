"""Exception types shared across the package."""


class GrammarError(Exception):
    """Base class for every error raised while loading or using a grammar."""


class SignatureError(GrammarError):
    pass


class DescriptionError(GrammarError):
    pass


class UnificationFailure(GrammarError):
    """Raised only by APIs that promise a value; most code returns None instead."""


class LexiconError(GrammarError):
    pass


class ParseError(GrammarError):
    pass


class UnknownTokenError(ParseError):
    def __init__(self, token: str, position: int):
        super().__init__(f"unknown token {token!r} at position {position}")
        self.token = token
        self.position = position


class EdgeLimitExceeded(ParseError):
    pass
