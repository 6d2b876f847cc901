"""Entry point for ``python -m polar_lab``."""

from polar_lab.app import run

if __name__ == "__main__":
    run()
