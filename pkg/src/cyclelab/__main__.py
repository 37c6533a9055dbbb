import sys

from cyclelab.cli.main import main

sys.exit(main())
