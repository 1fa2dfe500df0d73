import sys

from macroeval.cli import main

sys.exit(main())
