"""Photometric check of the lighting function.

Illuminance on the working plane from the same generalized Lambertian
elements that carry data, with radiant quantities mapped to lumens
through a fixed luminous efficacy.  No field-of-view or concentrator
terms apply here: the floor is not a photodiode.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "element_luminous_flux",
    "IlluminanceMap",
    "illuminance_map",
]


def element_luminous_flux(drive, bias, efficacy):
    """Luminous flux of one element, efficacy * 3 N V B (all colors on)."""
    return efficacy * 3.0 * drive.leds_per_color * drive.led_voltage * bias


@dataclass(frozen=True)
class IlluminanceMap:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # lux, shape (len(ys), len(xs))

    def at(self, x, y):
        """Value at the grid node nearest to (x, y)."""
        i = int(np.argmin(np.abs(self.ys - y)))
        j = int(np.argmin(np.abs(self.xs - x)))
        return float(self.values[i, j])

    def fraction_above(self, threshold):
        return float(np.mean(self.values > threshold))

    def total_flux(self):
        """Flux landing on the plane by the trapezoid rule, for sanity checks."""
        inner = np.trapezoid(self.values, self.xs, axis=1)
        return float(np.trapezoid(inner, self.ys))


def illuminance_map(transmitters, drive, bias, efficacy, room_size,
                    grid_step=0.1, plane_height=0.0):
    """Horizontal illuminance over the room on a uniform grid.

    E(p) = sum_elements Phi (m+1) / (2 pi d^2) cos^m(phi) cos(psi)
    with psi measured against the upward plane normal.  The grid spans
    the full floor inclusive of both edges, so the room center is a
    node whenever the step divides the side length evenly.
    """
    lx, ly = room_size[0], room_size[1]
    xs = np.linspace(0.0, lx, int(round(lx / grid_step)) + 1)
    ys = np.linspace(0.0, ly, int(round(ly / grid_step)) + 1)
    flux = element_luminous_flux(drive, bias, efficacy)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx, gy, np.full_like(gx, plane_height)], axis=-1)
    values = np.zeros_like(gx)
    for tx in transmitters:
        vec = pts - tx.position
        d = np.linalg.norm(vec, axis=-1)
        ray = vec / d[..., None]
        cos_psi = np.clip(-ray[..., 2], 0.0, None)
        for el in tx.elements:
            cos_phi = np.clip(ray @ el.boresight, 0.0, None)
            m = el.lambert_m
            values += (flux * (m + 1.0) / (2.0 * np.pi * d * d)
                       * cos_phi**m * cos_psi)
    return IlluminanceMap(xs=xs, ys=ys, values=values)
