"""Multi-camera 3D marker tracking: SLIC superpixels, DLT calibration and
triangulation, constant-velocity Kalman prediction, and weighted superpixel
matching. The heavy lifting lives in the _spxtrack extension."""

from ._spxtrack import (
    Kalman3D,
    Superpixel,
    __version__,
    calibrate,
    circular_hue_distance,
    nslic,
    project,
    rgb_to_hsv,
    select_best,
    slic_segment,
    superpixel_stats,
    to_gray,
    triangulate,
)

__all__ = [
    "Kalman3D",
    "Superpixel",
    "__version__",
    "calibrate",
    "circular_hue_distance",
    "nslic",
    "project",
    "rgb_to_hsv",
    "select_best",
    "slic_segment",
    "superpixel_stats",
    "to_gray",
    "triangulate",
]
