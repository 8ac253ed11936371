"""Sweep the droop ratio m2/m1 and compare the P1/P2 split against the inverse ratio."""
import dataclasses

from islandgrid.network import run, steady_state_report
from islandgrid.scenario import build_scenario


def main():
    # 12 kW keeps the heavier-loaded source inside its DC limit up to a 2:1 split
    base = build_scenario({"load": {"p": "12000"}})
    m1 = base.source_a.droop.m_coef
    print("m2/m1   P1 [W]     P2 [W]     P1/P2")
    for ratio in (0.5, 1.0, 1.5, 2.0):
        droop = dataclasses.replace(base.source_b.droop, m_coef=ratio * m1)
        sc = dataclasses.replace(base, source_b=dataclasses.replace(base.source_b, droop=droop))
        rep = steady_state_report(run(sc, check_dc=False))
        print(f"{ratio:5.2f}  {rep.p[0]:9.2f}  {rep.p[1]:9.2f}  {rep.p[0] / rep.p[1]:.6f}")


if __name__ == "__main__":
    main()
