"""Allow `python3 -m seatok` as an alternative to the console script."""

from .cli import main

main()
