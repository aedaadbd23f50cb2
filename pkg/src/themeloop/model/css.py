"""CSS serialization of themes, and the inverse parser.

``theme_to_css`` emits exactly five declarations, one per line, in a fixed
order; ``parse_css_theme`` accepts any whitespace layout and is the inverse
on valid themes.
"""
from __future__ import annotations

import re
from typing import Mapping

from .fonts import FontMetricTable, UnknownFontError, parse_font
from .settings import SettingsRangeError, TextSettings
from .themes import Provenance, Theme

#: CSS property order of the emitted block.
CSS_PROPERTY_ORDER = (
    "letter-spacing",
    "word-spacing",
    "line-height",
    "font-family",
    "font-size",
)

_CSS_TO_SETTING = {
    "letter-spacing": "character_spacing_em",
    "word-spacing": "word_spacing_em",
    "line-height": "line_height",
}

_DECL_RE = re.compile(r"([a-zA-Z-]+)\s*:\s*([^;{}]+);")
_COMMENT_RE = re.compile(r"/\*.*?\*/", re.S)


class CssParseError(ValueError):
    """Raised when CSS text cannot be interpreted as a theme."""


def format_css_number(value: float) -> str:
    """Render a number with minimal decimals (``0.10`` -> ``"0.1"``)."""
    text = f"{float(value):.6f}".rstrip("0").rstrip(".")
    if text in ("-0", ""):
        text = "0"
    return text


def theme_to_css(theme: Theme) -> str:
    """Serialize a theme's settings as five CSS declarations."""
    s = theme.settings
    lines = (
        f"letter-spacing: {format_css_number(s.character_spacing_em)}em;",
        f"word-spacing: {format_css_number(s.word_spacing_em)}em;",
        f"line-height: {format_css_number(s.line_height)};",
        f"font-family: {s.font.value};",
        f"font-size: {format_css_number(s.font_size_px)}px;",
    )
    return "\n".join(lines) + "\n"


def css_block(theme: Theme, *, indent: str = "  ") -> str:
    """Wrap the declarations in a class selector named after the theme."""
    body = theme_to_css(theme).rstrip("\n").replace("\n", f"\n{indent}")
    return f".{theme.theme_id} {{\n{indent}{body}\n}}\n"


def _parse_length_em(prop: str, raw: str) -> float:
    text = raw.strip()
    if not text.endswith("em"):
        raise CssParseError(f"{prop} must be an em length, got {raw.strip()!r}")
    try:
        return float(text[:-2])
    except ValueError:
        raise CssParseError(f"{prop} has a malformed value: {raw.strip()!r}") from None


def _parse_number(prop: str, raw: str) -> float:
    try:
        return float(raw.strip())
    except ValueError:
        raise CssParseError(f"{prop} has a malformed value: {raw.strip()!r}") from None


def parse_css_theme(
    text: str,
    *,
    theme_id: str = "parsed-css",
    provenance: Provenance = Provenance.BUNDLED,
    iteration: int = 0,
    table: FontMetricTable | None = None,
) -> Theme:
    """Parse CSS declarations back into a :class:`Theme`.

    The parser is whitespace-insensitive, ignores comments, selectors, and
    unrelated properties, and reports the offending property when a value is
    missing, malformed, or out of range.
    """
    declarations: dict[str, str] = {}
    for match in _DECL_RE.finditer(_COMMENT_RE.sub(" ", text)):
        declarations[match.group(1).strip().lower()] = match.group(2)

    missing = [p for p in CSS_PROPERTY_ORDER if p not in declarations]
    if missing:
        raise CssParseError(f"missing {missing[0]}")

    char_em = _parse_length_em("letter-spacing", declarations["letter-spacing"])
    word_em = _parse_length_em("word-spacing", declarations["word-spacing"])
    line_height = _parse_number("line-height", declarations["line-height"])

    family = declarations["font-family"].strip().strip("'\"")
    try:
        font = parse_font(family)
    except UnknownFontError:
        raise CssParseError(f"font-family names an unknown font: {family!r}") from None

    size_raw = declarations["font-size"].strip()
    if not size_raw.endswith("px"):
        raise CssParseError(f"font-size must be a px length, got {size_raw!r}")
    size_px = _parse_number("font-size", size_raw[:-2])

    _ = table  # reserved for future per-table validation of the parsed size
    try:
        settings = TextSettings(
            font=font,
            character_spacing_em=char_em,
            word_spacing_em=word_em,
            line_height=line_height,
            font_size_px=size_px,
        )
    except SettingsRangeError as exc:
        setting_to_css = {v: k for k, v in _CSS_TO_SETTING.items()}
        prop = next(
            (css for key, css in setting_to_css.items() if key in str(exc)),
            "font-size",
        )
        raise CssParseError(f"{prop} out of range: {exc}") from exc

    return Theme(
        theme_id=theme_id,
        settings=settings,
        provenance=provenance,
        iteration=iteration,
    )


def export_css(themes: Mapping[str, Theme] | list[Theme]) -> str:
    """Concatenate class-selector blocks for several themes."""
    items = list(themes.values()) if isinstance(themes, Mapping) else list(themes)
    return "\n".join(css_block(t) for t in items)
