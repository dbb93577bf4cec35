import sys

from balancedgl.cli import main

sys.exit(main())
