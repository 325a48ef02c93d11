"""Deterministic geometric toolkit for sparse vectorized HD-map construction.

Core pieces: the map-element data model and polyline geometry, physical-
prior query denoising, BEV foreground-mask rasterization, permutation-
equivalent set matching, Chamfer-distance AP evaluation, and a reference
deformable feature-aggregation kernel with analytic gradients. Everything
is pure and reproducible: fixed seeds give bit-identical outputs.
"""

from .elements import (BASE_RANGE, CLASS_ORDER, CLOSED_CLASSES, LONG_RANGE,
                       ClassLabel, EgoPose, MapElement, PerceptionRange,
                       make_element, wrap_angle)
from .geometry import (anchor_point, clip_to_range, curvature_profile,
                       denormalize_points, normalize_points, polyline_length,
                       resample_element, resample_polyline, segment_headings,
                       transform_to_frame, wrap_angles)
from .rng import Stream, mix64
from .denoise import (AppliedNoise, DenoiseGroup, NoisedItem, NoiseSpec,
                      apply_curvature_noise, apply_location_noise,
                      apply_rotation_noise, apply_scale_noise,
                      curvature_noise_applies, generate_denoise_groups,
                      noise_element)
from .matching import (Assignment, CostSpec, MatchPair, hungarian,
                       match_predictions, point_set_cost)
from .evaluation import (APReport, ClassResult, EvalSpec, Prediction,
                         ap_at_threshold, chamfer_distance, evaluate,
                         format_ap_percent, mean_ap)
from .raster import (BevGrid, RasterSpec, grid_shape, mask_iou,
                     pixel_to_world, rasterize_elements, world_to_pixel)
from .sampling import (AggregatedFeature, CameraModel, FeaturePyramid,
                       SamplePointSet, aggregate, aggregate_with_grad,
                       bilinear_sample, bilinear_sample_grad,
                       decoupled_aggregate, keypoints_from_element,
                       project_point, unproject_pixel)
from .io import (SceneRecord, element_from_dict, element_to_dict,
                 read_mask_files, read_scenes, write_mask_files, write_scenes)

__version__ = "0.1.0"

__all__ = [
    "BASE_RANGE", "CLASS_ORDER", "CLOSED_CLASSES", "LONG_RANGE",
    "ClassLabel", "EgoPose", "MapElement", "PerceptionRange",
    "make_element", "wrap_angle",
    "anchor_point", "clip_to_range", "curvature_profile",
    "denormalize_points", "normalize_points", "polyline_length",
    "resample_element", "resample_polyline", "segment_headings",
    "transform_to_frame", "wrap_angles",
    "Stream", "mix64",
    "AppliedNoise", "DenoiseGroup", "NoisedItem", "NoiseSpec",
    "apply_curvature_noise", "apply_location_noise", "apply_rotation_noise",
    "apply_scale_noise", "curvature_noise_applies", "generate_denoise_groups",
    "noise_element",
    "Assignment", "CostSpec", "MatchPair", "hungarian", "match_predictions",
    "point_set_cost",
    "APReport", "ClassResult", "EvalSpec", "Prediction", "ap_at_threshold",
    "chamfer_distance", "evaluate", "format_ap_percent", "mean_ap",
    "BevGrid", "RasterSpec", "grid_shape", "mask_iou", "pixel_to_world",
    "rasterize_elements", "world_to_pixel",
    "AggregatedFeature", "CameraModel", "FeaturePyramid", "SamplePointSet",
    "aggregate", "aggregate_with_grad", "bilinear_sample",
    "bilinear_sample_grad", "decoupled_aggregate", "keypoints_from_element",
    "project_point", "unproject_pixel",
    "SceneRecord", "element_from_dict", "element_to_dict", "read_mask_files",
    "read_scenes", "write_mask_files", "write_scenes",
    "__version__",
]
