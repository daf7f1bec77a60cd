class SimulatorError(Exception):
    """Base class for every error raised by the simulator"""


class ContractViolation(SimulatorError, ValueError):
    """A caller broke an operation's precondition"""


class ShapeError(ContractViolation):
    """Tensor shape does not match what the layer or model declares"""


class NumericalError(SimulatorError, FloatingPointError):
    """NaN or Inf reached a place that requires finite values"""


class CodecError(SimulatorError, ValueError):
    """Invalid bit width or value outside the signed code range"""


class ChannelError(SimulatorError):
    """Physically impossible channel state (e.g. zero fading magnitude)"""


class EnergyError(SimulatorError):
    """Energy undefined for the requested channel state"""


class DatasetError(SimulatorError):
    """Corpus or split cannot satisfy the request"""


class ConfigError(SimulatorError, ValueError):
    """Invalid configuration value; message names the offending key"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class SchemaError(SimulatorError):
    """Metrics file does not follow the expected column layout"""

    def __init__(self, column: str, message: str = "missing column"):
        self.column = column
        super().__init__(f"{message}: {column}")


class PrivacyError(SimulatorError):
    """Adversary cannot be trained or evaluated on the given pairs"""
