# tasks/__init__.py
# Long-running studies and their progress reporting.
pass
