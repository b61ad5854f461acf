import sys

from advectlab.cli import main

sys.exit(main())
