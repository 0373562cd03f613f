from __future__ import annotations

import base64
import re
import struct
import xml.etree.ElementTree as ET
import zlib

import numpy as np
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sawcavity.svg import heatmap, line_plot, png_bytes


def _decode_png(data):
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    pos, chunks = 8, {}
    while pos < len(data):
        (n,) = struct.unpack(">I", data[pos:pos + 4])
        tag, body = data[pos + 4:pos + 8], data[pos + 8:pos + 8 + n]
        (crc,) = struct.unpack(">I", data[pos + 8 + n:pos + 12 + n])
        assert crc == zlib.crc32(tag + body) & 0xFFFFFFFF
        chunks.setdefault(tag, b"")
        chunks[tag] += body
        pos += 12 + n
    w, h = struct.unpack(">II", chunks[b"IHDR"][:8])
    raw = zlib.decompress(chunks[b"IDAT"])
    rows = [raw[r * (3 * w + 1):(r + 1) * (3 * w + 1)] for r in range(h)]
    assert all(r[0] == 0 for r in rows)
    return np.frombuffer(b"".join(r[1:] for r in rows), dtype=np.uint8).reshape(h, w, 3)


@given(arrays(np.uint8, st.tuples(st.integers(1, 9), st.integers(1, 9), st.just(3))))
def test_png_round_trip(rgb):
    np.testing.assert_array_equal(_decode_png(png_bytes(rgb)), rgb)


def test_line_plot_is_valid_xml_with_gaps():
    x = np.linspace(0, 1, 50)
    y = np.sin(x)
    y[20] = np.nan
    root = ET.fromstring(line_plot([(x, y, "a<b"), (x, -y, None)], "t & u", "x", "y"))
    lines = root.findall("{http://www.w3.org/2000/svg}polyline")
    assert len(lines) == 4


def test_line_plot_all_nan():
    ET.fromstring(line_plot([(np.array([np.nan]), np.array([np.nan]), "x")]))


def test_heatmap_embeds_png_with_map_shape():
    z = np.arange(12.0).reshape(3, 4)
    text = heatmap(np.arange(4), np.arange(3), z)
    ET.fromstring(text)
    data = base64.b64decode(re.search(r"base64,([A-Za-z0-9+/=]+)", text).group(1))
    img = _decode_png(data)
    assert img.shape == (3, 4, 3)
    # low values dark at the bottom row, high values bright at the top row
    assert img[-1, 0].sum() < img[0, -1].sum()
