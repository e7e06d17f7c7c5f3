"""
Distance estimation error as people move away from the camera
=============================================================

Pixel noise is fixed in image space, but a pixel covers more of the
world the further away you look. This script measures the same group
of people at a range of camera distances and plots how the pairwise
distance error grows.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sdmonitor import (
    GroundTruthScene,
    NoiseModel,
    ScenePerson,
    calibrate,
    percent_error,
    process_stream,
    project,
)

OFFSETS = (0.6, 1.2, 1.8, 2.4)
DISTANCES = (3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0)
SEEDS = 150

# The same row of five people, re-simulated at each depth. Small random
# lateral shifts and a redrawn body width keep box edges off the pixel
# grid, so the quantization error behaves like generic pixel noise
# instead of vanishing at lucky depths.
results = []
for di, depth in enumerate(DISTANCES):
    errs = []
    for seed in range(SEEDS):
        rng = np.random.default_rng((di, seed))
        width_m = float(rng.uniform(0.5, 0.6))
        xs = [float(rng.uniform(-0.05, 0.05))]
        xs += [off + float(rng.uniform(-0.05, 0.05)) for off in OFFSETS]
        scene = GroundTruthScene(
            focal_length_px=1000.0,
            image_width=1920,
            image_height=1080,
            frame_count=1,
            persons=tuple(
                ScenePerson(pid, width_m, 1.7, ((x, depth),))
                for pid, x in enumerate(xs)
            ),
            camera_height_m=1.5,
            noise=NoiseModel(jitter_px=0.5, pixel_quantization=True),
        )
        frame = project(scene, 0, seed=seed)
        calib = calibrate(frame.detections[0].bbox, depth, width_m)
        report = next(iter(process_stream([frame], calib)))
        by_pair = {(p.id_a, p.id_b): p.distance_m for p in report.pairs}
        for i in range(1, 5):
            errs.append(percent_error(abs(xs[i] - xs[0]), by_pair[(0, i)]))
    results.append((np.mean(errs), np.percentile(errs, 90)))
    print(f"camera distance {depth:.0f} m: mean error {results[-1][0]:.2f}%, "
          f"90th percentile {results[-1][1]:.2f}%")

means = [r[0] for r in results]
p90s = [r[1] for r in results]

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(DISTANCES, means, "o-", label="mean")
ax.plot(DISTANCES, p90s, "s--", label="90th percentile")
ax.set_xlabel("camera distance (m)")
ax.set_ylabel("pair distance error (%)")
ax.set_title("estimation error grows with camera distance "
             f"({SEEDS} scenes per depth, half-pixel jitter)")
ax.legend()
ax.grid(alpha=0.3)
fig.savefig("error_vs_distance.png", dpi=120, bbox_inches="tight")
print("\nwrote error_vs_distance.png")
