import sys

from twinproof.cli import main


sys.exit(main())
