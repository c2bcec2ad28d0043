import subprocess
import os
import sys


def ejecutar_preset(config_file, jobs=None, check=False):
    command = [sys.executable, os.path.join("AQNM", "sim.py"), "--config", os.path.join("AQNM", "config", config_file)]
    if jobs:
        command += ["--jobs", str(jobs)]
    if check:
        command.append("--check")
    process = subprocess.Popen(command, stdout=subprocess.PIPE, stderr=subprocess.STDOUT)
    salida, _ = process.communicate()
    print(salida.decode("utf-8"))
    return process.returncode


def main():
    disponibles = sorted(f for f in os.listdir(os.path.join("AQNM", "config")) if f.endswith(".json"))
    print("Configuraciones disponibles: " + ", ".join(disponibles))
    config_file = input("Ingrese el nombre del archivo de configuración: ")
    jobs_input = input("Ingrese el número de procesos (predeterminado: el de la configuración): ")
    check = input("¿Comprobar los criterios de aceptación? [s/N]: ").strip().lower() == "s"
    codigo = ejecutar_preset(config_file, int(jobs_input) if jobs_input else None, check)
    print("Código de salida: {}".format(codigo))
    sys.exit(codigo)


if __name__ == "__main__":
    main()
