"""
Entry point of the lab when run from the source tree.
It dispatches to the ``lab`` command line.
"""

from polar_lab.app import run

if __name__ == "__main__":
    run()
