import sys

from maoeacs.harness.cli import main

sys.exit(main())
