# start.py
import os
import sys

# Settings come from TSL_* environment variables (see app/config.py); the store path is the one most often changed.
DATABASE = os.getenv("TSL_DATABASE", "test_spaces.db")

if __name__ == "__main__":
    from app.cli import main

    print(f"test-space store: {DATABASE}", file=sys.stderr)
    sys.exit(main(sys.argv[1:]))
