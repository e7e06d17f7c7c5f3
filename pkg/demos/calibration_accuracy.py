"""
How calibration quality limits depth accuracy
=============================================

The whole pipeline hangs off one number: the focal length recovered
from a single marker of known width at a known distance. This script
shows how pixel noise on that one marker box propagates into every
depth estimate afterwards, and why calibrating on a nearby marker
beats calibrating on a distant one.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from sdmonitor import (
    BoundingBox,
    GroundTruthScene,
    NoiseModel,
    ScenePerson,
    calibrate,
    estimate_depth,
    percent_error,
    project,
)

TRUE_FOCAL = 1000.0
WIDTH_M = 0.55
TRIALS = 200

# A lone marker person, re-simulated at several calibration distances
# with one pixel of box jitter. Each trial yields one recovered focal
# length; we then use it to estimate the depth of a test subject 6 m out.
# Closer than 3 m the marker's feet drop below the frame, so 3 m is the
# nearest usable distance with this camera geometry.
marker_distances = [3.0, 4.0, 6.0, 8.0, 10.0, 12.0]
test_depth = 6.0
test_width_px = TRUE_FOCAL * WIDTH_M / test_depth
test_box = BoundingBox(0.0, 0.0, test_width_px, 150.0)

focal_errors = []
depth_errors = []
for d in marker_distances:
    scene = GroundTruthScene(
        focal_length_px=TRUE_FOCAL,
        image_width=1920,
        image_height=1080,
        frame_count=TRIALS,
        persons=(ScenePerson(0, WIDTH_M, 1.7, ((0.0, d),)),),
        noise=NoiseModel(jitter_px=1.0),
    )
    f_err = []
    z_err = []
    for trial in range(TRIALS):
        frame = project(scene, trial, seed=3)
        calib = calibrate(frame.detections[0].bbox, d, WIDTH_M)
        f_err.append(percent_error(TRUE_FOCAL, calib.focal_length_px))
        z = estimate_depth(calib, test_box)
        z_err.append(percent_error(test_depth, z))
    focal_errors.append(np.mean(f_err))
    depth_errors.append(np.mean(z_err))
    print(f"marker at {d:5.1f} m: focal error {focal_errors[-1]:.2f}%, "
          f"depth error at 6 m {depth_errors[-1]:.2f}%")

# The marker box shrinks as 1/d, so a fixed pixel jitter becomes a
# relative width error that grows linearly with marker distance. The
# focal estimate, and with it every depth downstream, inherits exactly
# that error.
fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(marker_distances, focal_errors, "o-", label="focal length error")
ax.plot(marker_distances, depth_errors, "s--",
        label="depth error of a 6 m subject")
ax.set_xlabel("marker distance used for calibration (m)")
ax.set_ylabel("mean absolute error (%)")
ax.set_title(f"calibration error vs marker distance "
             f"({TRIALS} trials, 1 px jitter)")
ax.legend()
ax.grid(alpha=0.3)
fig.savefig("calibration_accuracy.png", dpi=120, bbox_inches="tight")
print("\nwrote calibration_accuracy.png")
