"""Double-dot antipodal grasp detection toolkit, independent of any backbone."""

__version__ = "0.1.0"

from .decode import DecodeConfig, GraspCandidate, KeyPoint, decode
from .geometry import DoubleDotGrasp, OrientedRect, Point2, Rotation2, grasp_to_rect, rect_to_grasp
from .labeling import LabelConfig, TargetMaps, render_targets
from .losses import FocalParams, LossBreakdown, loss_gradients, total_loss
from .maps import PredictionMaps
from .metrics import RectMetricConfig, evaluate, oriented_iou, rectangle_match
from .sim import GripperModel, PolygonScene, execute_grasp, generate_scene, gt_grasps
