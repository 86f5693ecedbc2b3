# Copyright 2026 The dfnet Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Streaming two-stage speech enhancement: ERB gains plus deep filtering."""

from ._core import (  # noqa: F401
    HOP,
    N_BINS,
    SAMPLE_RATE,
    ConfigError,
    Enhancer,
    Error,
    FormatError,
    IoError,
    ShapeError,
    TruncatedError,
    Weights,
    batch_stages,
    benchmark,
    clip_to_snr,
    combined_loss,
    count,
    deep_filter,
    enhance,
    erb_band_edges,
    erb_compress,
    erb_interpolate,
    istft,
    mix,
    mr_spec_loss,
    post_filter,
    read_wav,
    schedule_at,
    stft,
    write_wav,
)

__version__ = "0.1.0"
