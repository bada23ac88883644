import sys

from delaypress.cli import main

sys.exit(main())
