__all__ = (
    "TwinProofError",
    "InputError",
    "CapError",
    "DimensionCapError",
    "SizeCapError",
    "ShapeMismatchError",
    "HermiticityError",
    "NormalizationError",
    "DistributionError",
    "ConvergenceError",
    "GraphFormatError",
    "SelfLoopError",
    "ColoringError",
    "CircuitError",
    "CircuitFormatError",
    "CertificateError",
    "CertificateFormatError",
    "PrecisionError",
    "ProofFormatError",
    "SpectrumError",
    "GraphParameterError",
)


class TwinProofError(Exception):
    ...


class InputError(TwinProofError):
    ...


class CapError(TwinProofError):
    ...


class DimensionCapError(CapError):
    ...


class SizeCapError(CapError):
    ...


class ShapeMismatchError(TwinProofError, ValueError):
    ...


class HermiticityError(TwinProofError, ValueError):
    ...


class NormalizationError(TwinProofError, ValueError):
    ...


class DistributionError(TwinProofError, ValueError):
    ...


class ConvergenceError(TwinProofError, ArithmeticError):
    def __init__(self, *args):
        super().__init__(*args)
        self.__notes__ = ["Degenerate top spectrum; perturb the operator or allow fallback"]


class GraphFormatError(InputError, ValueError):
    ...


class SelfLoopError(GraphFormatError):
    ...


class ColoringError(InputError, ValueError):
    ...


class CircuitError(TwinProofError):
    ...


class CircuitFormatError(InputError, ValueError):
    ...


class CertificateError(InputError, ValueError):
    ...


class CertificateFormatError(CertificateError):
    ...


class PrecisionError(CertificateError):
    ...


class ProofFormatError(InputError, ValueError):
    ...


class SpectrumError(HermiticityError):
    ...


class GraphParameterError(InputError, ValueError):
    ...
