"""Exception hierarchy. Each family carries the exit status used by the CLI."""


class StegoError(Exception):
    exit_code = 1


class ImageFormatError(StegoError):
    exit_code = 3


class MalformedHeaderError(ImageFormatError):
    pass


class UnsupportedMaxvalError(ImageFormatError):
    pass


class TruncatedDataError(ImageFormatError):
    pass


class InvalidDimensionsError(ImageFormatError):
    pass


class ColorImageError(ImageFormatError):
    pass


class DiffError(StegoError):
    exit_code = 4


class KernelError(StegoError):
    exit_code = 5


class ConvolutionError(StegoError):
    exit_code = 6


class FieldError(StegoError):
    exit_code = 7


class CostError(StegoError):
    exit_code = 8


class EmbeddingError(StegoError):
    exit_code = 9


class PayloadError(EmbeddingError):
    pass


class ConvergenceError(EmbeddingError):
    pass


class ExtractionError(StegoError):
    exit_code = 10
