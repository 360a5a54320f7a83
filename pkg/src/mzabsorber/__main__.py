import sys

from mzabsorber.cli import main

sys.exit(main())
