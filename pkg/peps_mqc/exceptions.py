class MqcError(Exception):
    """
    Base class for every error raised by the package. ``exit_code`` is what the command line returns when the error
    escapes a command.
    """

    exit_code = 1

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


class InputError(MqcError):
    exit_code = 2


class ShapeError(InputError):
    pass


class SchemaError(InputError):
    pass


class ShorthandError(InputError):
    pass


class ConfigError(InputError):
    pass


class ResourceCapError(MqcError):
    exit_code = 3


class VerificationError(MqcError):
    exit_code = 4


class ConvergenceError(VerificationError):
    pass


class ZeroProbabilityError(MqcError):
    pass
