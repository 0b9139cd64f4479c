import sys

from finitegap import cli

sys.exit(cli.run())
