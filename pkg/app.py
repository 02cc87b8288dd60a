"""
tikband - Tikhonov estimators with uniform confidence bands
Command-line entry point

This is the main entry point for the tikband CLI.
"""
import sys
from pathlib import Path

# Add repository root to path
sys.path.append(str(Path(__file__).parent))

from ui.cli import main

if __name__ == "__main__":
    sys.exit(main())
