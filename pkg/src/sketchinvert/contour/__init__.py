from .detector import EdgeDetector, SobelDetector, detect_edges, estimate_gradient_direction
from .threshold import ThresholdConfig, dynamic_threshold
from .pipeline import extract_contour, load_edge_grid, save_edge_grid

__all__ = [
    "EdgeDetector",
    "SobelDetector",
    "detect_edges",
    "estimate_gradient_direction",
    "ThresholdConfig",
    "dynamic_threshold",
    "extract_contour",
    "load_edge_grid",
    "save_edge_grid",
]
