import sys

from rocscale.cli import cli

if __name__ == "__main__":
    sys.exit(cli())
