import sys

from tourwidth.cli import main

sys.exit(main())
