from intprop.cli import run

run()
