import os
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from qalpha.color_image import RasterImage
from qalpha.imageio import read_image

DATA = Path(__file__).parent / "data"
STANDIN = DATA / "standin_256.ppm"


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_raster(rng, h=8, w=8, full_range=False):
    data = rng.integers(0, 256, size=(h, w, 3)).astype(float)
    if full_range:
        data[0, 0] = 0.0
        data[-1, -1] = 255.0
    return RasterImage(data)


def reference_image():
    """The USC-SIPI tree image when supplied, else the bundled stand-in.

    Returns ``(image, is_tree)``.  Point QALPHA_TREE_IMAGE at a copy of the
    tree image (any format Pillow reads) to run the reference-number checks.
    """
    path = os.environ.get("QALPHA_TREE_IMAGE")
    if path:
        with Image.open(path) as im:
            return RasterImage(np.asarray(im.convert("RGB"), dtype=float)), True
    return read_image(STANDIN), False


def downscale(img: RasterImage, size: int = 128) -> RasterImage:
    if img.height == size and img.width == size:
        return img
    small = Image.fromarray(img.to_uint8()).resize((size, size), Image.LANCZOS)
    return RasterImage(np.asarray(small, dtype=float))


ACCEPTANCE_NOTES: dict = {}


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "skipped", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            if outcome == "passed" and rep.when != "call":
                continue
            name = nodeid.split("::")[-1]
            num = int(name.split("_")[2])
            rows.append((num, outcome.upper().replace("PASSED", "PASS").replace("FAILED", "FAIL")
                         .replace("SKIPPED", "SKIP"), name))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, outcome, name in sorted(rows):
        note = ACCEPTANCE_NOTES.get(num, "")
        terminalreporter.write_line(f"criterion {num:2d}: {outcome:5s} {name}  {note}".rstrip())
