import json
import os
import subprocess
import sys

WIZARD_JSON = os.path.join("AQNM", "config", "wizard.json")


def modificar_JSON_configuracion(preset="cell-ofdma", seed=1, jobs=1, bits=("inf", 3, 4), n_drops=20, n_ttis=200,
                                 scheduler="OFDMA_PF", n_symbols=20):
    with open(WIZARD_JSON, 'r') as file:
        data = json.load(file)

    data["name"] = preset.replace("-", "_") + "_wizard"
    data["preset"] = preset
    data["seed"] = seed
    data["jobs"] = jobs
    data["network"]["bits"] = list(bits)
    data["network"]["n_drops"] = n_drops
    data["network"]["n_ttis"] = n_ttis
    data["network"]["scheduler"] = scheduler
    data["link"]["n_symbols"] = n_symbols

    with open(WIZARD_JSON, 'w') as file:
        json.dump(data, file, indent=4)


def ejecutar_simulacion():
    command = [sys.executable, os.path.join("AQNM", "sim.py"), "--config", WIZARD_JSON, "--check"]
    process = subprocess.Popen(command, stdout=subprocess.PIPE, stderr=subprocess.STDOUT)
    salida, _ = process.communicate()
    print(salida.decode("utf-8"))
    return process.returncode


def leer_bits(texto):
    bits = []
    for parte in texto.split(","):
        parte = parte.strip()
        if parte:
            bits.append("inf" if parte.lower().startswith("inf") else int(parte))
    return bits


def main():
    preset = input("Ingrese el experimento (power-table, aqnm-curves, link-validate, sdma-link, cell-ofdma, "
                   "cell-sdma, tx-psd, aclr-sweep, evm-sweep) (predeterminado: cell-ofdma): ") or "cell-ofdma"

    seed_input = input("Ingrese la semilla (predeterminado: 1): ")
    seed = int(seed_input) if seed_input else 1

    jobs_input = input("Ingrese el número de procesos (predeterminado: 1): ")
    jobs = int(jobs_input) if jobs_input else 1

    bits_input = input("Ingrese las resoluciones del ADC separadas por comas (predeterminado: inf,3,4): ")
    bits = leer_bits(bits_input) if bits_input else ["inf", 3, 4]

    drops_input = input("Ingrese el número de despliegues de usuarios (predeterminado: 20): ")
    n_drops = int(drops_input) if drops_input else 20

    ttis_input = input("Ingrese el número de TTIs por despliegue (predeterminado: 200): ")
    n_ttis = int(ttis_input) if ttis_input else 200

    scheduler = input("Ingrese el planificador OFDMA_PF, TDMA_PF o SDMA_GREEDY (predeterminado: OFDMA_PF): ") or "OFDMA_PF"

    symbols_input = input("Ingrese el número de símbolos OFDM por punto del enlace (predeterminado: 20): ")
    n_symbols = int(symbols_input) if symbols_input else 20

    modificar_JSON_configuracion(preset, seed, jobs, bits, n_drops, n_ttis, scheduler, n_symbols)
    sys.exit(ejecutar_simulacion())


if __name__ == "__main__":
    main()
