import sys

from anwel.cli import main

sys.exit(main())
