import sys

from detlam.cli import main

sys.exit(main())
