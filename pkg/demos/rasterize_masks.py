"""Rasterize a small frame into per-class BEV masks and print them as ASCII.

Uses a coarse grid so the masks fit in a terminal. Also shows the
world/pixel transforms and a mask IoU between a clean and a shifted copy.
"""

import numpy as np

from mapforge import (BASE_RANGE, CLASS_ORDER, ClassLabel, RasterSpec,
                      make_element, mask_iou, pixel_to_world,
                      rasterize_elements, world_to_pixel)


def ascii_mask(mask, step_r, step_c):
    rows = []
    for r in range(0, mask.shape[0], step_r):
        rows.append("".join("#" if mask[r, c] else "." for c in range(0, mask.shape[1], step_c)))
    return "\n".join(rows)


def main():
    elements = [
        make_element(ClassLabel.DIVIDER, [(-12.0, 0.0), (12.0, 0.0)]),
        make_element(ClassLabel.BOUNDARY, [(-12.0, 22.0), (12.0, 22.0)]),
        make_element(ClassLabel.BOUNDARY, [(-12.0, -22.0), (12.0, -22.0)]),
        make_element(ClassLabel.PED_CROSSING,
                     [(-4.0, 8.0), (4.0, 8.0), (4.0, 13.0), (-4.0, 13.0)]),
        make_element(ClassLabel.CENTERLINE, [(0.0, -22.0), (0.0, 22.0)]),
    ]

    spec = RasterSpec(resolution=0.6, line_half_width=0.6)
    grid = rasterize_elements(elements, spec, BASE_RANGE)
    print(f"grid {grid.height} rows x {grid.width} cols, "
          f"{spec.resolution} m/px, classes {[c.value for c in CLASS_ORDER]}")

    for label in (ClassLabel.PED_CROSSING, ClassLabel.CENTERLINE):
        m = grid.channel(label)
        print(f"\n{label.value}: {int(np.count_nonzero(m))} px set")
        print(ascii_mask(m, 4, 2))

    # row 0 is max y; pixel centers sit at half-cell offsets
    r, c = world_to_pixel((0.0, 0.0), grid)
    x, y = pixel_to_world(r, c, grid)
    print(f"\nworld (0, 0) -> pixel ({r:.2f}, {c:.2f}) -> world ({x:.2f}, {y:.2f})")

    # IoU against a half-meter shifted crossing
    shifted = [elements[3].with_points(elements[3].points + [0.5, 0.0])]
    g2 = rasterize_elements(shifted, spec, BASE_RANGE)
    iou = mask_iou(grid.channel(ClassLabel.PED_CROSSING), g2.channel(ClassLabel.PED_CROSSING))
    print(f"ped_crossing IoU after 0.5 m shift: {iou:.3f}")


if __name__ == "__main__":
    main()
