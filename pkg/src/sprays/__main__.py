"""Allow running as `python -m sprays`."""

from sprays.cli import main

main()
