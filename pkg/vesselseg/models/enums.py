from enum import Enum


class Channel(str, Enum):
    GRAY = "gray"
    RED = "red"
    GREEN = "green"
    BLUE = "blue"


class SegmentationMode(str, Enum):
    TFA = "tfa"
    TFAE = "tfae"


class SureMode(str, Enum):
    COEFFICIENTS = "coefficients"
    IMAGE = "image"


class TerminationReason(str, Enum):
    EMPTY_SET = "empty_set"
    STALL_FALLBACK = "stall_fallback"
    MAX_ITERATIONS = "max_iterations"
