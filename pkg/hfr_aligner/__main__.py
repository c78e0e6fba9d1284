"""
Entry point for hfr-aligner.
"""

import sys

from hfr_aligner.app import main

if __name__ == "__main__":
    sys.exit(main())
