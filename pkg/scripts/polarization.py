"""Polarization and power-density curves of the default fuel cell for several crossover resistances."""
import numpy as np

from islandgrid import dmfc


def main():
    for r2 in (0.0, 0.1, 0.3):
        cell = dmfc.DmfcCell(r2=r2)
        pts = dmfc.polarization_curve(cell, 1001)
        k = int(np.argmax([p.power_density for p in pts]))
        print(f"r2={r2:.1f}  E(0)={pts[0].voltage:.4f} V  E(i_max)={pts[-1].voltage:.4f} V  "
              f"peak {pts[k].power_density:.1f} W/m2 at {pts[k].current_density:.1f} A/m2")


if __name__ == "__main__":
    main()
