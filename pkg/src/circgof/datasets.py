"""Small published datasets used in the real-data examples.

Values are stored exactly as printed, in their original unit.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .circular import deg2rad, wrap
from .regression import PairedSample


@dataclass(frozen=True)
class DatasetDescriptor:
    id: str
    angle_unit: str
    columns: tuple[str, str]
    provenance: str
    x_values: tuple[float, ...]
    y_values: tuple[float, ...]

    def sample(self) -> PairedSample:
        x = np.asarray(self.x_values, dtype=float)
        y = np.asarray(self.y_values, dtype=float)
        if self.angle_unit == "deg":
            return PairedSample(deg2rad(x), deg2rad(y))
        return PairedSample(wrap(x), wrap(y))

    def checksum(self) -> str:
        text = ";".join(
            [self.id, self.angle_unit, ",".join(map(repr, self.x_values)), ",".join(map(repr, self.y_values))]
        )
        return hashlib.sha256(text.encode()).hexdigest()


WIND_MILWAUKEE = DatasetDescriptor(
    id="wind-milwaukee",
    angle_unit="deg",
    columns=("6am", "noon"),
    provenance="Wind direction at 6 a.m. and noon on 21 consecutive days, Milwaukee (Johnson & Wehrly 1977)",
    x_values=(356, 97.2, 211, 232, 343, 292, 157, 302, 335, 302, 324,
              84.6, 324, 340, 157, 238, 254, 146, 232, 122, 329),
    y_values=(119, 162, 221, 259, 270, 28.8, 97.2, 292, 39.6, 313, 94.2,
              45, 47, 108, 221, 270, 119, 248, 270, 45, 23.4),
)

BLOOD_PRESSURE = DatasetDescriptor(
    id="blood-pressure",
    angle_unit="deg",
    columns=("theta", "phi"),
    provenance="Peak times of diastolic blood pressure, two consecutive measurements, 10 students (Downs 1974)",
    x_values=(30, 15, 11, 4, 348, 347, 341, 333, 332, 285),
    y_values=(25, 5, 349, 358, 340, 347, 345, 331, 329, 287),
)

# fitted response angles (degrees) printed alongside the blood-pressure data
BLOOD_PRESSURE_FITTED_DEG = (24, 9, 5, 359, 344, 343, 337, 330, 329, 287)

GENE_PEAKS = DatasetDescriptor(
    id="gene-peaks",
    angle_unit="rad",
    columns=("heart", "liver"),
    provenance="Peak expression phases of 38 circadian genes in heart and liver (Liu et al. 2006)",
    x_values=(0.12, 0.27, 0.29, 0.3, 0.31, 0.34, 0.35, 0.58, 0.62, 1.6,
              2.35, 2.62, 2.83, -3.06, -2.86, -2.77, -2.69, -2.57, -2.56, -2.45,
              -2.43, -2.37, -2.18, -2.16, -2.04, -1.61, -1.32, -1.22, -0.84, -0.77,
              -0.38, -0.36, -0.26, -0.19, -0.18, -0.13, -0.12, -0.02),
    y_values=(0.61, 0.95, -2.85, 0.67, -0.13, 0.08, 2.67, 1.72, 1.45, 1.59,
              -2.51, -2.92, 1.42, 2.74, 2.88, -3.01, -2.69, 3.05, -2.35, 2.68,
              -2.86, -2.51, 2.69, -2.11, -1.48, -2.06, -2.63, -1.49, -0.83, 0.86,
              0.26, 1.5, 1.03, 0.33, -1.15, -0.21, -0.55, 0.91),
)

DATASETS = {d.id: d for d in (WIND_MILWAUKEE, BLOOD_PRESSURE, GENE_PEAKS)}


def get(dataset_id: str) -> DatasetDescriptor:
    try:
        return DATASETS[dataset_id]
    except KeyError:
        raise KeyError(f"unknown dataset {dataset_id!r}; known: {', '.join(DATASETS)}") from None
