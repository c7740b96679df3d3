import sys

from hessteg.cli import main

sys.exit(main())
