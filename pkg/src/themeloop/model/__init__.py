"""Core domain model: fonts, settings, themes, participants, and records."""
from .css import (
    CSS_PROPERTY_ORDER,
    CssParseError,
    css_block,
    export_css,
    format_css_number,
    parse_css_theme,
    theme_to_css,
)
from .fonts import (
    DEFAULT_METRICS,
    REFERENCE_FONT,
    REFERENCE_SIZE_PX,
    SELECTABLE_FONTS,
    Font,
    FontMetricTable,
    FontMetrics,
    MissingFontMetricError,
    UnknownFontError,
    normalized_font_size,
    parse_font,
)
from .participants import (
    AGE_BUCKETS,
    DYSLEXIA_SCORE_THRESHOLD,
    MAX_AGE,
    MIN_AGE,
    Participant,
    age_bucket,
)
from .records import (
    LogCorruptionError,
    RatingPhase,
    RatingRecord,
    RatingValue,
    RefinementEvent,
    RefinementLog,
    apply_events,
    good_fraction,
)
from .settings import (
    CHARACTER_SPACING_RANGE,
    CHARACTER_SPACING_STEP,
    LINE_HEIGHT_RANGE,
    LINE_HEIGHT_STEP,
    SETTING_KEYS,
    SLIDERS,
    WORD_SPACING_RANGE,
    WORD_SPACING_STEP,
    SettingsRangeError,
    TextSettings,
    clamp_to_slider,
    snap_to_slider,
)
from .themes import (
    BUNDLED_THEMES,
    COMPACT_THEME,
    CONTROL_THEME,
    OPEN_THEME,
    RELAXED_THEME,
    DuplicateThemeIdError,
    Provenance,
    Theme,
    ensure_unique_ids,
)

__all__ = [
    "AGE_BUCKETS",
    "BUNDLED_THEMES",
    "CHARACTER_SPACING_RANGE",
    "CHARACTER_SPACING_STEP",
    "COMPACT_THEME",
    "CONTROL_THEME",
    "CSS_PROPERTY_ORDER",
    "CssParseError",
    "DEFAULT_METRICS",
    "DYSLEXIA_SCORE_THRESHOLD",
    "DuplicateThemeIdError",
    "Font",
    "FontMetricTable",
    "FontMetrics",
    "LINE_HEIGHT_RANGE",
    "LINE_HEIGHT_STEP",
    "LogCorruptionError",
    "MAX_AGE",
    "MIN_AGE",
    "MissingFontMetricError",
    "OPEN_THEME",
    "Participant",
    "Provenance",
    "RatingPhase",
    "RatingRecord",
    "RatingValue",
    "REFERENCE_FONT",
    "REFERENCE_SIZE_PX",
    "RefinementEvent",
    "RefinementLog",
    "RELAXED_THEME",
    "SELECTABLE_FONTS",
    "SETTING_KEYS",
    "SLIDERS",
    "SettingsRangeError",
    "TextSettings",
    "Theme",
    "UnknownFontError",
    "WORD_SPACING_RANGE",
    "WORD_SPACING_STEP",
    "age_bucket",
    "apply_events",
    "clamp_to_slider",
    "css_block",
    "ensure_unique_ids",
    "export_css",
    "format_css_number",
    "good_fraction",
    "normalized_font_size",
    "parse_css_theme",
    "parse_font",
    "snap_to_slider",
    "theme_to_css",
]
