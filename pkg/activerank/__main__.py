from activerank.cli import run_cli

run_cli()
