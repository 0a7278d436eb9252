#!/usr/bin/env python
import os
import sys

if __name__ == "__main__":
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "polcascade.settings")

    from django.core.management import execute_from_command_line

    # Commands are spelled with dashes on the command line (eval-pair),
    # Django wants module names (eval_pair).
    if len(sys.argv) > 1 and not sys.argv[1].startswith("-"):
        sys.argv[1] = sys.argv[1].replace("-", "_")

    execute_from_command_line(sys.argv)
