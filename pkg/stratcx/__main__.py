import sys

from stratcx.cli import main

sys.exit(main())
