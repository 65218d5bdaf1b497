"""Discrete-time kinematic MAV model with command clamping and swept-segment
collision rejection. First-order, no inertia: the vehicle is a waypoint
follower and dynamics would add nothing testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import wrap_rad


@dataclass(frozen=True)
class MavPose:
    x: float
    y: float
    heading: float  # radians in [0, 2*pi)


@dataclass(frozen=True)
class VelocityCommand:
    v_forward: float = 0.0
    v_lateral: float = 0.0  # +left
    yaw_rate: float = 0.0  # rad/s, +CCW


ZERO_COMMAND = VelocityCommand()


@dataclass(frozen=True)
class KinematicsParams:
    v_max: float = 1.0  # m/s, per axis
    yaw_rate_max: float = math.radians(60.0)
    collision_radius: float = 0.15  # m
    dt: float = 0.05  # s, fixed step


def _clip(v: float, limit: float) -> float:
    if v > limit:
        return limit
    if v < -limit:
        return -limit
    return v


def clamp_command(cmd: VelocityCommand, params: KinematicsParams) -> VelocityCommand:
    """Clamp each component to its limit, preserving sign."""
    return VelocityCommand(
        v_forward=_clip(cmd.v_forward, params.v_max),
        v_lateral=_clip(cmd.v_lateral, params.v_max),
        yaw_rate=_clip(cmd.yaw_rate, params.yaw_rate_max),
    )


def step(world, pose: MavPose, cmd: VelocityCommand, params: KinematicsParams):
    """Advance one fixed step. Returns (new_pose, collided).

    Position integrates the body-frame command rotated by the pre-step
    heading. If the swept segment comes within collision_radius of any wall,
    obstacle, or column, the step is rejected and the prior pose returned
    with the collision flag set; the mission layer decides the response.
    """
    from . import kernels  # local import keeps kinematics importable standalone

    dt = params.dt
    new_heading = wrap_rad(pose.heading + cmd.yaw_rate * dt)
    c, s = math.cos(pose.heading), math.sin(pose.heading)
    dx = (cmd.v_forward * c - cmd.v_lateral * s) * dt
    dy = (cmd.v_forward * s + cmd.v_lateral * c) * dt
    nx, ny = pose.x + dx, pose.y + dy
    if dx != 0.0 or dy != 0.0:
        clearance = kernels.segment_clearance(pose.x, pose.y, nx, ny, world.segs, world.discs)
        if clearance < params.collision_radius:
            return pose, True
    return MavPose(nx, ny, new_heading), False
