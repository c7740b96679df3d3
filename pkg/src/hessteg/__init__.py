"""Adaptive spatial-domain steganography driven by second-order image derivatives."""

from hessteg.convolution import ResponseMap, convolve
from hessteg.distortion import CostMap, cost_map
from hessteg.embedding import (
    EmbedParams,
    Message,
    StegoKey,
    change_stats,
    embed,
    extract,
    simulate,
)
from hessteg.hessian import HessianField, build_field
from hessteg.image_io import DiffMap, Image, diff, load_image, save_image
from hessteg.kernels import (
    Kernel,
    RationalMatrix,
    classic_gradient,
    classic_second_order,
    compose_second_order,
    ko_x2,
    ko_xy,
    ky_x2,
    ky_xy,
    lagrange_d1,
    rotate_90,
)
from hessteg.oracle import oracle_second_derivative

__version__ = "0.1.0"

__all__ = [
    "CostMap",
    "DiffMap",
    "EmbedParams",
    "HessianField",
    "Image",
    "Kernel",
    "Message",
    "RationalMatrix",
    "ResponseMap",
    "StegoKey",
    "build_field",
    "change_stats",
    "classic_gradient",
    "classic_second_order",
    "compose_second_order",
    "convolve",
    "cost_map",
    "diff",
    "embed",
    "extract",
    "ko_x2",
    "ko_xy",
    "ky_x2",
    "ky_xy",
    "lagrange_d1",
    "load_image",
    "oracle_second_derivative",
    "rotate_90",
    "save_image",
    "simulate",
]
