import sys

from tfseizure.cli import main

sys.exit(main())
