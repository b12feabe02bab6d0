"""Online video super-resolution with multirate inverse filterbanks."""

from ._core import (
    CacheStaleError,
    ConfigError,
    DesignError,
    DimensionError,
    Engine,
    Error,
    IoError,
    Method,
    ParseError,
    SrrParams,
    bicubic_upscale,
    mse,
    mse_db,
    psnr,
    ssim,
    super_resolve,
    synthetic,
)

__all__ = [
    "CacheStaleError",
    "ConfigError",
    "DesignError",
    "DimensionError",
    "Engine",
    "Error",
    "IoError",
    "Method",
    "ParseError",
    "SrrParams",
    "bicubic_upscale",
    "mse",
    "mse_db",
    "psnr",
    "ssim",
    "super_resolve",
    "synthetic",
]
