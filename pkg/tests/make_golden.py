"""Regenerate the CLI golden files: ``python3 tests/make_golden.py``.

Only run this after a deliberate change to the command line output; the
golden tests exist to catch accidental ones.
"""

import sys
import tempfile

from cli_cases import CASES, run_case, write_golden


def main():
    with tempfile.TemporaryDirectory() as tmp:
        for name, (_, _, expected) in CASES.items():
            code, outputs = run_case(name, f"{tmp}/{name}")
            if code != expected:
                sys.exit(f"{name}: exit code {code}, expected {expected}")
            write_golden(name, outputs)
            print(f"{name}: {', '.join(outputs)}")


if __name__ == "__main__":
    main()
