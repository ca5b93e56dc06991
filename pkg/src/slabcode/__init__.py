"""slabcode: read spray-painted color-band traceability codes on granite slabs."""

from .banddetect import BandDetection, ColorSpec, detect_all, detect_color, group_by_mvd
from .colorspace import Hsv8, Rgb8, convert_image_to_hsv, rgb_to_hsv
from .config import AppConfig, default_config, load_config, save_config
from .decoder import (
    DecodeResult,
    DigitKey,
    Direction,
    decode,
    decode_image,
    reading_direction,
)
from .errors import (
    BoundsError,
    ConfigError,
    EmptySplitError,
    ManifestError,
    NoBandsError,
    ParamError,
    SlabcodeError,
)
from .raster import (
    CropRect,
    GaussianKernel,
    binarize,
    crop,
    gaussian_blur,
    make_gaussian_kernel,
    scale_down,
    to_grayscale,
)
from .segmentation import BoundingRect, HsvRange, connected_components, filter_by_whr, hsv_mask
from .synthgen import PROFILES, FixtureRecord, SynthParams, SynthProfile, generate_dataset, generate_slab
from .trainer import (
    DatasetManifest,
    EvalReport,
    ParamGrid,
    evaluate_color,
    evaluate_full,
    grid_search,
    load_manifest,
    train_all,
)

__version__ = "0.1.0"
