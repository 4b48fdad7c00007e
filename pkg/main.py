"""
Entry point for the fiscal-tiebout command line.

    python main.py equilibrium --config scenarios/default.toml --out out/default

LLM Prompt Example:
    "Show how a module-level CLI object built by a factory keeps `python main.py`
    and an installed console script on the same code path."
"""

from fiscal_tiebout.cli.app import create_cli

cli = create_cli()

if __name__ == "__main__":
    cli()
