"""Deterministic grayscale rasterizer for text settings.

The renderer is hermetic: it does not consult system fonts. Each font is
drawn as a parametric glyph model driven by its metric table entry (x-height,
advance width, serif flag), which preserves exactly what downstream learning
needs — the visual consequences of spacing, density, size, and letterform
class — while keeping output byte-identical across machines.

Pixels are uint8: 0 is ink, 255 is background.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model.fonts import DEFAULT_METRICS, FontMetricTable
from ..model.settings import TextSettings

INK = 0
BACKGROUND = 255
DEFAULT_WIDTH_PX = 576  # six inches at 96 dpi
DEFAULT_MARGIN_PX = 8

_ASCENDERS = set("bdfhklt") | set("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")
_DESCENDERS = set("gjpqy")
_VOWELS = set("aeiouAEIOU")


class LayoutError(ValueError):
    """Raised when text cannot be laid out in the requested width."""


@dataclass(frozen=True)
class RasterImage:
    """A rendered grayscale page."""

    pixels: np.ndarray  # uint8, shape (height_px, width_px)

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.dtype != np.uint8:
            raise ValueError("pixels must be a 2-D uint8 array")
        object.__setattr__(self, "pixels", arr)

    @property
    def height_px(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width_px(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def ink_fraction(self) -> float:
        return float(np.mean(self.pixels < 128))


def _glyph_plan(settings: TextSettings, table: FontMetricTable):
    """Derive integer drawing dimensions from settings and font metrics."""
    m = table[settings.font]
    size = settings.font_size_px
    x_height = max(2, round(m.x_height_ratio * size))
    ascender = max(x_height + 1, round(0.70 * size))
    descender = max(1, round(0.22 * size))
    advance = (m.avg_advance_ratio + settings.character_spacing_em) * size
    glyph_width = max(1, round(0.78 * m.avg_advance_ratio * size))
    if advance < 1.0:
        raise LayoutError(
            f"character advance collapsed to {advance:.2f}px; settings too tight"
        )
    word_gap = advance + settings.word_spacing_em * size
    pitch = settings.line_height * size
    return m, x_height, ascender, descender, advance, glyph_width, word_gap, pitch


def _draw_glyph(
    canvas: np.ndarray,
    ch: str,
    x: int,
    baseline: int,
    x_height: int,
    ascender: int,
    descender: int,
    glyph_width: int,
    serif: bool,
) -> None:
    h, w = canvas.shape
    x0, x1 = max(0, x), min(w, x + glyph_width)
    if x1 <= x0:
        return

    if ch in ".,;:'\"!?-":
        dot = max(1, x_height // 4)
        y0, y1 = max(0, baseline - dot), min(h, baseline + 1)
        canvas[y0:y1, x0 : min(w, x0 + dot)] = INK
        if ch in "!?":
            canvas[max(0, baseline - x_height) : max(0, baseline - x_height + dot), x0 : min(w, x0 + dot)] = INK
        return

    top = baseline - (ascender if ch in _ASCENDERS else x_height)
    y0, y1 = max(0, top), min(h, baseline + 1)
    canvas[y0:y1, x0:x1] = INK
    if ch in _DESCENDERS:
        canvas[min(h, baseline) : min(h, baseline + descender + 1), x0:x1] = INK

    # Per-character texture: a carved background notch keeps letterforms
    # distinguishable so crops carry more signal than solid bars.
    if glyph_width >= 3:
        notch = x0 + 1 + (ord(ch) * 7) % max(1, glyph_width - 2)
        if x0 < notch < x1:
            canvas[y0 : max(y0, baseline - x_height // 2), notch] = BACKGROUND
    if ch in _VOWELS and x_height >= 4:
        mid = baseline - x_height // 2
        if 0 <= mid < h:
            canvas[mid, x0:x1] = BACKGROUND

    if serif and glyph_width >= 2:
        for y in (baseline, top):
            if 0 <= y < h:
                canvas[y, max(0, x0 - 1) : min(w, x1 + 1)] = INK


def layout_lines(
    settings: TextSettings,
    text: str,
    width_px: int = DEFAULT_WIDTH_PX,
    *,
    margin_px: int = DEFAULT_MARGIN_PX,
    table: FontMetricTable | None = None,
) -> list[list[str]]:
    """Greedy word wrap; returns the words on each line."""
    table = DEFAULT_METRICS if table is None else table
    _, _, _, _, advance, _, word_gap, _ = _glyph_plan(settings, table)
    usable = width_px - 2 * margin_px
    if usable < advance:
        raise LayoutError(f"width {width_px}px leaves no room for text")

    lines: list[list[str]] = [[]]
    cursor = 0.0
    for word in text.split():
        word_width = len(word) * advance
        if word_width > usable:
            raise LayoutError(
                f"word {word!r} needs {word_width:.0f}px but only "
                f"{usable}px is available"
            )
        if lines[-1] and cursor + word_width > usable:
            lines.append([])
            cursor = 0.0
        lines[-1].append(word)
        cursor += word_width + word_gap
    if not lines[-1] and len(lines) > 1:
        lines.pop()
    return lines


def render(
    settings: TextSettings,
    text: str,
    width_px: int = DEFAULT_WIDTH_PX,
    *,
    margin_px: int = DEFAULT_MARGIN_PX,
    table: FontMetricTable | None = None,
) -> RasterImage:
    """Render ``text`` under ``settings`` into a grayscale page image.

    Deterministic: identical inputs produce identical pixels. Page width is
    fixed; height grows with the amount of wrapped text and the line pitch.
    """
    table = DEFAULT_METRICS if table is None else table
    if not text.split():
        raise LayoutError("cannot render empty text")
    m, x_height, ascender, descender, advance, glyph_width, word_gap, pitch = (
        _glyph_plan(settings, table)
    )
    lines = layout_lines(
        settings, text, width_px, margin_px=margin_px, table=table
    )
    n_lines = len(lines)
    height = margin_px + ascender + round((n_lines - 1) * pitch) + descender + margin_px
    canvas = np.full((height, width_px), BACKGROUND, dtype=np.uint8)

    for i, words in enumerate(lines):
        baseline = margin_px + ascender + round(i * pitch)
        cursor = float(margin_px)
        for word in words:
            for j, ch in enumerate(word):
                _draw_glyph(
                    canvas,
                    ch,
                    round(cursor + j * advance),
                    baseline,
                    x_height,
                    ascender,
                    descender,
                    glyph_width,
                    m.serif,
                )
            cursor += len(word) * advance + word_gap
    return RasterImage(canvas)


def write_pgm(image: RasterImage, path) -> None:
    """Write a binary PGM (P5) file."""
    header = f"P5\n{image.width_px} {image.height_px}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(image.pixels.tobytes())


def read_pgm(path) -> RasterImage:
    """Read a binary PGM (P5) file produced by :func:`write_pgm`."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM file")
    fields: list[bytes] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    width, height, maxval = (int(f) for f in fields)
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    return RasterImage(pixels.reshape(height, width).copy())
