import os
import sys
import glob
import subprocess
from multiprocessing import Process

import pandas as pd

# columns summarized per result table, grouped by the first entry
RESUMENES = {
    "power_table": ("arch", ["mw"]),
    "alpha_table": ("n_bits", ["alpha", "alpha_mse_mc", "noise_corr"]),
    "link_validate": ("mode", ["post_eq_db", "predicted_db"]),
    "sdma_link": ("n_adc", ["loss_db", "predicted_loss_db"]),
    "cdf_summary": ("scheduler", ["value"]),
    "network_stats": ("scheduler", ["median_sinr_db", "frac_above_1gbps", "mean_rate_bps"]),
    "aclr_sweep": ("lpf_order", ["aclr_db"]),
    "evm_floor": ("n_bits", ["evm_floor_pct", "predicted_pct"]),
}


def leer_tabla(path):
    return pd.read_csv(path, comment="#")


def resumir_tabla(nombre, df):
    grupo, columnas = RESUMENES.get(nombre, (None, []))
    columnas = [c for c in columnas if c in df.columns]
    if not columnas:
        return df.head(20)
    if grupo is None or grupo not in df.columns:
        return df[columnas].describe()
    return df.groupby(grupo)[columnas].agg(["mean", "min", "max"])


def obtener_resumen(results_directory):
    tablas = sorted(glob.glob(os.path.join(results_directory, "*.csv")))
    if not tablas:
        print(f"No se encontraron tablas de resultados en {results_directory}")
        return {}
    resumen = {}
    for path in tablas:
        nombre = os.path.splitext(os.path.basename(path))[0]
        try:
            df = leer_tabla(path)
        except Exception as e:
            print(f"Error leyendo {path}: {e}")
            continue
        resumen[nombre] = resumir_tabla(nombre, df)
        print(f"\n=== {nombre} ({len(df)} filas) ===")
        print(resumen[nombre].to_string())
    return resumen


def mostrar_comprobaciones(run_directory):
    check_log = os.path.join(run_directory, "logs", "check.log")
    if not os.path.exists(check_log):
        return 0, 0
    with open(check_log) as f:
        lineas = [l.strip() for l in f if " PASS " in l or " FAIL " in l]
    fallos = [l for l in lineas if " FAIL " in l]
    print(f"\nCriterios de aceptación: {len(lineas) - len(fallos)} superados, {len(fallos)} fallidos")
    for l in fallos:
        print("  " + l)
    return len(lineas), len(fallos)


def dibujar(results_directory):
    for script in sorted(glob.glob(os.path.join(results_directory, "*_plot.py"))):
        subprocess.Popen([sys.executable, os.path.basename(script)], cwd=results_directory).wait()


def ultimo_experimento(root="experiments"):
    runs = [d for d in glob.glob(os.path.join(root, "*")) if os.path.isdir(os.path.join(d, "results"))]
    return max(runs, key=os.path.getmtime) if runs else None


def main():
    predeterminado = ultimo_experimento()
    run_directory = input(f"Ingrese el directorio del experimento (predeterminado: {predeterminado}): ") or predeterminado
    if not run_directory or not os.path.isdir(run_directory):
        print("No hay ningún experimento que evaluar.")
        return
    graficas = input("¿Generar las gráficas? [s/N]: ").strip().lower() == "s"

    results_directory = os.path.join(run_directory, "results")
    plot_process = None
    if graficas:
        plot_process = Process(target=dibujar, args=(results_directory,))
        plot_process.start()

    obtener_resumen(results_directory)
    mostrar_comprobaciones(run_directory)

    if plot_process is not None:
        plot_process.join()


if __name__ == "__main__":
    main()
