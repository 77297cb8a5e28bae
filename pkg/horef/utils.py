# Copyright Notice:
# Copyright 2026 horef contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see LICENSE.md

# Utilities used through out the library
#   Stopwatch
#   thread_count()
#   variable_names()

import os
import time
import itertools
import logging

logger = logging.getLogger(__name__)

THREADS_ENV = 'HOREF_THREADS'


class Stopwatch(object):
    """
    Monotonic wall clock measuring elapsed milliseconds
    """
    def __init__(self):
        self.start = time.monotonic()

    @property
    def millis(self):
        return int((time.monotonic() - self.start) * 1000)


def thread_count(default=1):
    """
    Number of worker threads allowed by HOREF_THREADS (at least 1)
    """
    raw = os.getenv(THREADS_ENV)
    if raw is None:
        return default
    try:
        count = int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {THREADS_ENV}={raw!r}")
        return default
    return max(1, count)


def variable_names(start, skip=()):
    """
    Yields variable names starting at the letter 'start' and running to Z,
    then the same letters with numeric suffixes (A1, B1, ...).

    Names listed in 'skip' are never produced.
    """
    letters = [chr(c) for c in range(ord(start), ord('Z') + 1)]
    for suffix in itertools.chain([''], itertools.count(1)):
        for letter in letters:
            name = letter + str(suffix)
            if name not in skip:
                yield name
