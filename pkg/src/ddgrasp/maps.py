"""The 8-channel raster shared by target rendering, decoding and the DDHM container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# plane order of the DDHM payload
CHANNELS = (
    "fingertip_score",
    "center_score",
    "fingertip_offset_x",
    "fingertip_offset_y",
    "center_offset_x",
    "center_offset_y",
    "sin",
    "cos",
)


@dataclass
class PredictionMaps:
    """Branch outputs on the down-sampled grid.

    Offsets are ``(H, W, 2)`` arrays holding ``(dx, dy)`` in cell units; every
    other channel is ``(H, W)``.
    """

    fingertip_score: np.ndarray
    center_score: np.ndarray
    fingertip_offset: np.ndarray
    center_offset: np.ndarray
    sin_map: np.ndarray
    cos_map: np.ndarray

    def __post_init__(self):
        shape = np.shape(self.fingertip_score)
        if len(shape) != 2:
            raise ValueError(f"score map must be 2-D, got shape {shape}")
        for name in ("center_score", "sin_map", "cos_map"):
            if np.shape(getattr(self, name)) != shape:
                raise ValueError(f"{name} shape {np.shape(getattr(self, name))} != {shape}")
        for name in ("fingertip_offset", "center_offset"):
            if np.shape(getattr(self, name)) != shape + (2,):
                raise ValueError(f"{name} shape {np.shape(getattr(self, name))} != {shape + (2,)}")

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(np.shape(self.fingertip_score))

    def planes(self) -> list[np.ndarray]:
        return [
            self.fingertip_score,
            self.center_score,
            self.fingertip_offset[..., 0],
            self.fingertip_offset[..., 1],
            self.center_offset[..., 0],
            self.center_offset[..., 1],
            self.sin_map,
            self.cos_map,
        ]

    @classmethod
    def from_planes(cls, planes) -> "PredictionMaps":
        if len(planes) != len(CHANNELS):
            raise ValueError(f"expected {len(CHANNELS)} planes, got {len(planes)}")
        p = [np.asarray(x) for x in planes]
        return cls(
            fingertip_score=p[0],
            center_score=p[1],
            fingertip_offset=np.stack([p[2], p[3]], axis=-1),
            center_offset=np.stack([p[4], p[5]], axis=-1),
            sin_map=p[6],
            cos_map=p[7],
        )

    @classmethod
    def zeros(cls, height: int, width: int) -> "PredictionMaps":
        z = np.zeros((height, width))
        return cls(z, z.copy(), np.zeros((height, width, 2)), np.zeros((height, width, 2)), z.copy(), z.copy())

    def copy(self) -> "PredictionMaps":
        return PredictionMaps.from_planes([np.array(p, copy=True) for p in self.planes()])
