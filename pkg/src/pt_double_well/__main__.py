"""Entry point for ``python -m pt_double_well``."""

from __future__ import annotations

from pt_double_well.cli.app import main

if __name__ == "__main__":
    raise SystemExit(main())
