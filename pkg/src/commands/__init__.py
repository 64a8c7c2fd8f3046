"""
Subcommands of the SSH bath CLI
"""
