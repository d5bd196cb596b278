"""
CLI subcommand modules
"""

from primesums.cli.commands import counting, health, lemmas, residues, sumsets, tables, transference

COMMAND_MODULES = (tables, counting, lemmas, residues, sumsets, transference, health)

__all__ = ["counting", "health", "lemmas", "residues", "sumsets", "tables", "transference", "COMMAND_MODULES"]
