"""Planar n-revolute chains: joint centers, r vectors and the 3 x n Jacobian.

Joint 1 sits at the origin and every joint angle is measured relative to the
previous link, so link i points along the cumulative angle theta_1 + ... + theta_i.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError
from .geometry import E


@dataclass(frozen=True)
class Manipulator:
    link_lengths: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.link_lengths)
        if len(a) < 2:
            raise InvalidArgumentError("a manipulator needs at least 2 links")
        if not all(math.isfinite(x) and x > 0 for x in a):
            raise InvalidArgumentError(f"link lengths must be positive and finite, got {a}")
        object.__setattr__(self, "link_lengths", a)

    @property
    def n(self) -> int:
        return len(self.link_lengths)

    def as_array(self) -> np.ndarray:
        return np.array(self.link_lengths)

    def scaled(self, factor: float) -> "Manipulator":
        return Manipulator(tuple(factor * x for x in self.link_lengths))

    def to_dict(self) -> dict:
        return {"link_lengths": list(self.link_lengths)}

    @classmethod
    def from_dict(cls, data: dict) -> "Manipulator":
        if not isinstance(data, dict) or "link_lengths" not in data:
            raise InvalidArgumentError('manipulator JSON must be an object with a "link_lengths" key')
        return cls(tuple(data["link_lengths"]))

    @classmethod
    def from_json(cls, text: str) -> "Manipulator":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Posture:
    """Joint angles in radians, kept unwrapped."""

    theta: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(x) for x in self.theta)
        if not all(math.isfinite(x) for x in t):
            raise InvalidArgumentError("joint angles must be finite")
        object.__setattr__(self, "theta", t)

    @property
    def n(self) -> int:
        return len(self.theta)

    @classmethod
    def from_degrees(cls, degrees: Sequence[float]) -> "Posture":
        return cls(tuple(math.radians(d) for d in degrees))

    def degrees(self) -> tuple[float, ...]:
        return tuple(math.degrees(t) for t in self.theta)

    def as_array(self) -> np.ndarray:
        return np.array(self.theta)

    def equivalent(self, other: "Posture", atol: float = 1e-12) -> bool:
        """Equality of joint angles modulo 2*pi."""
        if self.n != other.n:
            return False
        d = np.remainder(self.as_array() - other.as_array() + np.pi, 2 * np.pi) - np.pi
        return bool(np.all(np.abs(d) <= atol))

    def to_dict(self, degrees: bool = True) -> dict:
        if degrees:
            return {"theta_deg": list(self.degrees())}
        return {"theta_rad": list(self.theta)}

    @classmethod
    def from_dict(cls, data: dict) -> "Posture":
        if not isinstance(data, dict):
            raise InvalidArgumentError("posture JSON must be an object")
        keys = {"theta_deg", "theta_rad"} & set(data)
        if len(keys) != 1:
            raise InvalidArgumentError('posture JSON needs exactly one of "theta_deg" or "theta_rad"')
        if "theta_deg" in keys:
            return cls.from_degrees(data["theta_deg"])
        return cls(tuple(data["theta_rad"]))

    @classmethod
    def from_json(cls, text: str) -> "Posture":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class JacobianBlocks:
    """``J = [A; B]`` with A a row of ones and B columns ``E r_j``."""

    A: np.ndarray
    B: np.ndarray
    r: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def J(self) -> np.ndarray:
        return np.vstack([self.A, self.B])


def _check(m: Manipulator, p: Posture):
    if m.n != p.n:
        raise InvalidArgumentError(f"posture has {p.n} angles but the manipulator has {m.n} joints")


def joint_centers(m: Manipulator, p: Posture) -> tuple[np.ndarray, np.ndarray]:
    """Return the (n, 2) joint centers and the operation point P."""
    _check(m, p)
    cum = np.cumsum(p.as_array())
    links = m.as_array()[:, None] * np.column_stack([np.cos(cum), np.sin(cum)])
    pos = np.vstack([np.zeros(2), np.cumsum(links, axis=0)])
    return pos[:-1], pos[-1]


def r_vectors(m: Manipulator, p: Posture) -> np.ndarray:
    """Vectors from each joint center to the operation point, shape (n, 2)."""
    _check(m, p)
    cum = np.cumsum(p.as_array())
    links = m.as_array()[:, None] * np.column_stack([np.cos(cum), np.sin(cum)])
    # suffix sums rather than P - center_j, so r_n is exactly the last link
    return np.cumsum(links[::-1], axis=0)[::-1]


def jacobian(m: Manipulator, p: Posture) -> JacobianBlocks:
    r = r_vectors(m, p)
    B = E @ r.T
    A = np.ones((1, m.n))
    for arr in (A, B, r):
        arr.setflags(write=False)
    return JacobianBlocks(A=A, B=B, r=r)
