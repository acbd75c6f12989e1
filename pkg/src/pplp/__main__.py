import sys

from pplp.cli import main

sys.exit(main())
