from .enums import Channel, SegmentationMode, SureMode, TerminationReason
from .fields import EigenField, HessianField, Kernel, VectorField
from .frames import Band, FrameCoefficients, FrameFamily, TransformKind
from .image import BinaryMask, Image, PixelSet
from .phantom import PhantomSpec, TubeSpec
from .reports import ComparisonReport, MetricReport, ModeSummary
from .trace import DecisionParams, IterationRecord, IterationTrace

__all__ = [
    "Band",
    "BinaryMask",
    "Channel",
    "ComparisonReport",
    "DecisionParams",
    "EigenField",
    "FrameCoefficients",
    "FrameFamily",
    "HessianField",
    "Image",
    "IterationRecord",
    "IterationTrace",
    "Kernel",
    "MetricReport",
    "ModeSummary",
    "PhantomSpec",
    "PixelSet",
    "SegmentationMode",
    "SureMode",
    "TerminationReason",
    "TransformKind",
    "TubeSpec",
    "VectorField",
]
