import sys

from crossmine.cli import main

sys.exit(main())
