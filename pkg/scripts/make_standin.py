"""Regenerate tests/data/standin_256.ppm.

The acceptance suite wants the USC-SIPI "Tree" image (misc volume, 4.1.06).
When it is not available we use a 256x256 centre crop of scikit-image's
public-domain ``rocket`` photograph (NASA) as a stand-in.  Run once:

    python scripts/make_standin.py
"""

from pathlib import Path

import numpy as np
from PIL import Image
from skimage import data

from qalpha.color_image import RasterImage
from qalpha.imageio import write_ppm

img = data.rocket()
h, w = img.shape[:2]
side = min(h, w)
top, left = (h - side) // 2, (w - side) // 2
crop = Image.fromarray(img[top:top + side, left:left + side]).resize((256, 256), Image.LANCZOS)
out = Path(__file__).resolve().parent.parent / "tests" / "data" / "standin_256.ppm"
write_ppm(RasterImage(np.asarray(crop, dtype=float)), out)
print(f"wrote {out}")
