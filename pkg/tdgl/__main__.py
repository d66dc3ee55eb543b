''' Allow ``python -m tdgl`` '''
import sys

from tdgl.cli import main

sys.exit(main())
