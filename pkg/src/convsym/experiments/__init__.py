"""Process drivers, rate fits, decay suites and report writers."""
