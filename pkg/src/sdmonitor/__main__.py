"""Allow ``python -m sdmonitor`` to invoke the command-line interface."""

from sdmonitor.cli import main

if __name__ == "__main__":
    raise SystemExit(main())
