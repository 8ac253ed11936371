"""Run the reference microgrid to steady state and print the dispatch."""
import argparse
import time

from islandgrid.network import run, steady_state_report
from islandgrid.scenario import build_scenario, read_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=None)
    args = ap.parse_args()

    sc = build_scenario(read_config(args.config) if args.config else None)
    print(f"PV: {sc.pv_strings} parallel strings, {sc.source_a.dc_available:.1f} W available")
    print(f"FC: {sc.fc_cell.n_series} cells, rated at eta={sc.fc_eta_rated:.5f}")
    start = time.perf_counter()
    trace = run(sc)
    elapsed = time.perf_counter() - start
    print(steady_state_report(trace).summary(("pv", "fc")))
    print(f"{len(trace)} steps in {elapsed:.2f} s")


if __name__ == "__main__":
    main()
