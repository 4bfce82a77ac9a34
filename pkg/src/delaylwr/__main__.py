import sys

from delaylwr.cli import main

sys.exit(main())
