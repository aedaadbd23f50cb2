"""Rendering: passages, the deterministic rasterizer, and crop sampling."""
from .crops import (
    CROP_SIDE,
    MAX_SAMPLE_ATTEMPTS,
    MIN_INK_FRACTION,
    Crop,
    CropSamplingError,
    ImageTooSmallError,
    InkStarvedImageError,
    ink_fraction,
    load_crops,
    pack_crops,
    sample_crops,
)
from .passages import (
    BUILTIN_PASSAGES,
    DEFAULT_RENDER_PASSAGE_ID,
    GRADE_SCREEN_COUNTS,
    GRADE_WORD_RANGES,
    PassageText,
    default_render_text,
    even_screen_bounds,
    get_passage,
    passages_for_grade,
)
from .raster import (
    BACKGROUND,
    DEFAULT_MARGIN_PX,
    DEFAULT_WIDTH_PX,
    INK,
    LayoutError,
    RasterImage,
    layout_lines,
    read_pgm,
    render,
    write_pgm,
)

__all__ = [
    "BACKGROUND",
    "BUILTIN_PASSAGES",
    "CROP_SIDE",
    "Crop",
    "CropSamplingError",
    "DEFAULT_MARGIN_PX",
    "DEFAULT_RENDER_PASSAGE_ID",
    "DEFAULT_WIDTH_PX",
    "GRADE_SCREEN_COUNTS",
    "GRADE_WORD_RANGES",
    "INK",
    "ImageTooSmallError",
    "InkStarvedImageError",
    "LayoutError",
    "MAX_SAMPLE_ATTEMPTS",
    "MIN_INK_FRACTION",
    "PassageText",
    "RasterImage",
    "default_render_text",
    "even_screen_bounds",
    "get_passage",
    "ink_fraction",
    "layout_lines",
    "load_crops",
    "pack_crops",
    "passages_for_grade",
    "read_pgm",
    "render",
    "sample_crops",
    "write_pgm",
]
