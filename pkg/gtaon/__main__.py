import sys

from gtaon.harness.cli import main


sys.exit(main())
