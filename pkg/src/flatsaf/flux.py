"""Deterministic walks from Galois conjugates of IET orbit displacements."""

import csv
import io
from dataclasses import dataclass, field as dc_field

from .field import galois_conjugate, sign_at

DEFAULT_STEPS = 2000
DEFAULT_DIGITS = 12


@dataclass
class WalkConfig:
    iet: object
    x: object
    steps: int = DEFAULT_STEPS
    embeddings: tuple = (3, 5)
    digits: int = DEFAULT_DIGITS

    def validate(self):
        if self.steps < 1:
            raise ValueError("steps must be positive")
        k1, k2 = self.embeddings
        if k1 == k2:
            raise ValueError("the two embeddings must differ")
        if self.x.field is not self.iet.field:
            raise ValueError("start point and interval exchange live in different fields")
        if sign_at(self.x) < 0 or sign_at(self.iet.total - self.x) <= 0:
            raise ValueError("start point is outside the interval")


@dataclass
class WalkResult:
    points: list                  # (step, u, v) with u, v decimal strings
    trail: list                   # exact orbit x_0, x_1, ...
    truncated_at: int = None      # step at which a discontinuity was hit
    notes: list = dc_field(default_factory=list)

    def max_abs(self):
        return max((max(abs(float(u)), abs(float(v))) for _, u, v in self.points), default=0.0)

    def bounding_box(self):
        us = [float(u) for _, u, _ in self.points]
        vs = [float(v) for _, _, v in self.points]
        return min(us), max(us), min(vs), max(vs)


def walk(config):
    """Orbit x_j = T^j(x) mapped to the conjugate pair of x_j - x, for j < steps."""
    config.validate()
    iet, x = config.iet, config.x
    k1, k2 = config.embeddings
    cuts = set(iet.discontinuities())
    points, trail = [], []
    cur = x
    for j in range(config.steps):
        if j and cur in cuts:
            return WalkResult(points, trail, truncated_at=j,
                              notes=[f"orbit reached a discontinuity at step {j}"])
        trail.append(cur)
        d = cur - x
        points.append((j, galois_conjugate(d, k1).numeric(config.digits),
                       galois_conjugate(d, k2).numeric(config.digits)))
        cur = iet(cur)
    return WalkResult(points, trail)


def csv_text(points):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", "u", "v"])
    writer.writerows(points)
    return buf.getvalue()


def emit_csv(points, path):
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(points))


def svg_text(points, size=600, radius=1.5):
    if points:
        us = [float(u) for _, u, _ in points]
        vs = [float(v) for _, _, v in points]
        x0, x1, y0, y1 = min(us), max(us), min(vs), max(vs)
    else:
        x0 = x1 = y0 = y1 = 0.0
    span = max(x1 - x0, y1 - y0) or 1.0
    pad = span * 0.05
    scale = size / (span + 2 * pad)
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    for _, u, v in points:
        cx = (float(u) - x0 + pad) * scale
        cy = size - (float(v) - y0 + pad) * scale
        lines.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{radius}" fill="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_svg(points, path):
    with open(path, "w") as fh:
        fh.write(svg_text(points))
