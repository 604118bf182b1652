"""Main entry point for eitcool"""

import sys

from eitcool.interfaces.cli import run


def main():
    """Console script entry"""
    sys.exit(run())


if __name__ == "__main__":
    main()
