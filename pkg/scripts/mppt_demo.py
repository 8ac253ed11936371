"""P&O tracking on the default PV module at a few irradiance levels."""
from islandgrid import mppt, pv_model


def main():
    module = pv_model.PvArray()
    for g in (200.0, 600.0, 1000.0):
        arr = pv_model.with_irradiance(module, g)
        v_oc = pv_model.open_circuit_voltage(arr)
        traj = mppt.mppt_run(arr, mppt.mppt_init(0.2 * v_oc, 0.005 * v_oc, v_oc), max_iters=400)
        v, p = mppt.settled_point(traj)
        ref = pv_model.mpp_oracle(arr)
        print(f"G={g:6.0f} W/m2  tracked {v:7.3f} V {p:8.3f} W  "
              f"oracle {ref.voltage:7.3f} V {ref.power:8.3f} W  ratio {p / ref.power:.5f}")


if __name__ == "__main__":
    main()
